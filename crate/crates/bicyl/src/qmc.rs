//! Quasi-Monte Carlo estimators for the intersection volume and the
//! intersection lateral-surface area of two arbitrary finite cylinders.
//!
//! Volume: Sobol samples drawn uniformly inside the first cylinder are
//! classified against the second; the hit fraction times the first
//! cylinder's volume estimates the intersection volume. Surface area: both
//! lateral surfaces are sampled, and each cylinder contributes its surface
//! area weighted by the fraction of its surface points lying inside the
//! other.
//!
//! Containment of a point is decided by its distance to the other
//! cylinder's axis segment, which classifies membership in a capsule
//! (cylinder plus hemispherical end caps). [`Containment::StrictFinite`]
//! additionally requires the unclamped axial parameter to fall in [0, 1],
//! i.e. membership in the flat-capped finite cylinder. The two agree
//! whenever the overlap region is away from the segment ends, as in the
//! reduced configuration.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{build_reduced_pair, orthonormal_basis, Cylinder, ReducedConfig, Vec3};
use crate::lowdisc::{splitmix64_next, SobolSampler};

/// Relative slack on the containment radius. Lateral-surface samples sit on
/// the classification boundary by construction; without slack, coincident
/// or tangent configurations would classify points by rounding noise.
const CONTAINMENT_REL_TOL: f64 = 1e-9;

/// Stream tags deriving independent Sobol scramble seeds for the interior
/// and the two surface sample streams.
const INTERIOR_STREAM: u64 = 0x7649_4E54;
const SURFACE_STREAM_1: u64 = 0x5355_5246_0001;
const SURFACE_STREAM_2: u64 = 0x5355_5246_0002;

/// Containment predicate used when classifying samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Containment {
    /// Distance to the axis segment ≤ radius: capsule membership,
    /// matching the clamped point-to-segment test.
    #[default]
    SegmentCapsule,
    /// Capsule test plus unclamped axial parameter in [0, 1]: membership
    /// in the flat-capped finite cylinder.
    StrictFinite,
}

/// Configuration of the stochastic estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmcSpec {
    /// Samples per stream are 2^log2_samples; allowed range 10..=26.
    pub log2_samples: u32,
    /// Seed for the digital-shift scrambling; `None` uses the raw sequence.
    pub scramble_seed: Option<u64>,
    pub containment: Containment,
    /// Worker threads for the hit-count loops. Hits are integers summed
    /// over contiguous index ranges, so the result is independent of the
    /// thread count.
    pub threads: usize,
}

pub const MIN_LOG2_SAMPLES: u32 = 10;
pub const MAX_LOG2_SAMPLES: u32 = 26;

impl Default for QmcSpec {
    fn default() -> Self {
        QmcSpec {
            log2_samples: 20,
            scramble_seed: None,
            containment: Containment::SegmentCapsule,
            threads: 1,
        }
    }
}

impl QmcSpec {
    pub fn validate(&self) -> Result<()> {
        if self.log2_samples < MIN_LOG2_SAMPLES || self.log2_samples > MAX_LOG2_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "log2_samples {} outside {MIN_LOG2_SAMPLES}..={MAX_LOG2_SAMPLES}",
                self.log2_samples
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidParameter(
                "threads must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn n_samples(&self) -> u64 {
        1u64 << self.log2_samples
    }
}

/// Volume estimate: `value = hit_fraction · π r₁² L₁`, exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    /// Estimated intersection volume (length³).
    pub value: f64,
    /// Fraction of first-cylinder interior samples inside the second.
    pub hit_fraction: f64,
    pub n_used: u64,
}

/// Area estimate: `value = f₁·A₁ + f₂·A₂`, exactly, with `n_used` samples
/// drawn on each surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    /// Estimated intersection lateral surface area (length²).
    pub value: f64,
    /// Fraction of first-cylinder surface samples inside the second.
    pub hit_fraction_c1: f64,
    /// Fraction of second-cylinder surface samples inside the first.
    pub hit_fraction_c2: f64,
    pub n_used: u64,
}

fn derived_seed(base: Option<u64>, tag: u64) -> Option<u64> {
    base.map(|seed| {
        let mut state = seed ^ tag;
        splitmix64_next(&mut state)
    })
}

// ── Containment test ────────────────────────────────────────────────

/// Precomputed axis data for repeated containment queries against one
/// cylinder.
struct AxisFrame {
    a: Vec3,
    ab: Vec3,
    inv_ab_dot: f64,
    r_tol_sq: f64,
    strict: bool,
}

impl AxisFrame {
    fn new(c: &Cylinder, containment: Containment) -> Self {
        let a = c.axis_start();
        let ab = c.axis_end() - a;
        let r_tol = c.radius() * (1.0 + CONTAINMENT_REL_TOL);
        AxisFrame {
            a,
            ab,
            inv_ab_dot: 1.0 / ab.norm_squared(),
            r_tol_sq: r_tol * r_tol,
            strict: containment == Containment::StrictFinite,
        }
    }

    #[inline]
    fn contains(&self, p: Vec3) -> bool {
        let ap = p - self.a;
        let t = ap.dot(self.ab) * self.inv_ab_dot;
        if self.strict && !(0.0..=1.0).contains(&t) {
            return false;
        }
        let closest = self.ab * t.clamp(0.0, 1.0);
        (ap - closest).norm_squared() <= self.r_tol_sq
    }
}

// ── Sample maps ─────────────────────────────────────────────────────

/// Local frame mapping unit-cube Sobol coordinates onto one cylinder.
#[derive(Clone, Copy)]
struct CylinderFrame {
    a: Vec3,
    u: Vec3,
    v: Vec3,
    d: Vec3,
    len: f64,
    r: f64,
}

impl CylinderFrame {
    fn new(c: &Cylinder) -> Result<Self> {
        let (u, v, d) = orthonormal_basis(c.axis_end() - c.axis_start())?;
        Ok(CylinderFrame {
            a: c.axis_start(),
            u,
            v,
            d,
            len: c.length(),
            r: c.radius(),
        })
    }

    /// (u₁,u₂,u₃) → a + u₃L·d + r√u₁·(cos(2πu₂)·u + sin(2πu₂)·v).
    /// The square root makes the radial density uniform over the disk.
    #[inline]
    fn interior(&self, s: [f64; 3]) -> Vec3 {
        let radial = self.r * s[0].sqrt();
        let theta = TAU * s[1];
        let z = s[2] * self.len;
        self.a + self.d * z + self.u * (radial * theta.cos()) + self.v * (radial * theta.sin())
    }

    /// (u₁,u₂) → a + u₂L·d + r·(cos(2πu₁)·u + sin(2πu₁)·v), a point on the
    /// lateral surface.
    #[inline]
    fn surface(&self, s: [f64; 2]) -> Vec3 {
        let theta = TAU * s[0];
        let z = s[1] * self.len;
        self.a + self.d * z + self.u * (self.r * theta.cos()) + self.v * (self.r * theta.sin())
    }
}

// ── Public samplers ─────────────────────────────────────────────────

/// Streams 2^log2_samples Sobol points mapped uniformly into the interior
/// of `c` (the stream used by [`estimate_intersection_volume`]).
pub fn sample_cylinder_interior(
    c: &Cylinder,
    spec: &QmcSpec,
) -> Result<impl Iterator<Item = Vec3>> {
    spec.validate()?;
    let frame = CylinderFrame::new(c)?;
    let mut sampler =
        SobolSampler::<3>::new(derived_seed(spec.scramble_seed, INTERIOR_STREAM))?;
    Ok((0..spec.n_samples()).map(move |_| frame.interior(sampler.next_point())))
}

/// Streams 2^log2_samples Sobol points mapped onto the lateral surface of
/// `c` (the first-surface stream used by [`estimate_intersection_area`]).
pub fn sample_cylinder_surface(
    c: &Cylinder,
    spec: &QmcSpec,
) -> Result<impl Iterator<Item = Vec3>> {
    spec.validate()?;
    let frame = CylinderFrame::new(c)?;
    let mut sampler =
        SobolSampler::<2>::new(derived_seed(spec.scramble_seed, SURFACE_STREAM_1))?;
    Ok((0..spec.n_samples()).map(move |_| frame.surface(sampler.next_point())))
}

// ── Hit counting ────────────────────────────────────────────────────

/// Counts samples satisfying `hit` over the 2^m-point Sobol block,
/// partitioned into contiguous index ranges across `threads` workers.
/// The total is a sum of integers, so it does not depend on the split.
fn count_hits<const D: usize, F>(
    seed: Option<u64>,
    m: u32,
    threads: usize,
    hit: F,
) -> Result<u64>
where
    F: Fn([f64; D]) -> bool + Sync,
{
    let n = 1u64 << m;
    let workers = threads.min(n as usize).max(1);
    let proto = SobolSampler::<D>::new(seed)?;

    if workers == 1 {
        let mut sampler = proto;
        let mut hits = 0u64;
        for _ in 0..n {
            if hit(sampler.next_point()) {
                hits += 1;
            }
        }
        return Ok(hits);
    }

    let chunk = n.div_ceil(workers as u64);
    let hit = &hit;
    let proto = &proto;
    let total = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                scope.spawn(move || {
                    let start = w * chunk;
                    let end = ((w + 1) * chunk).min(n);
                    let mut sampler = proto.clone();
                    sampler.seek(start as u32);
                    let mut hits = 0u64;
                    for _ in start..end {
                        if hit(sampler.next_point()) {
                            hits += 1;
                        }
                    }
                    hits
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });
    Ok(total)
}

// ── Estimators ──────────────────────────────────────────────────────

/// Estimates the intersection volume of `c1` and `c2` by sampling the
/// interior of `c1`. A zero hit fraction (disjoint cylinders) is a valid
/// outcome.
pub fn estimate_intersection_volume(
    c1: &Cylinder,
    c2: &Cylinder,
    spec: &QmcSpec,
) -> Result<VolumeEstimate> {
    spec.validate()?;
    let frame = CylinderFrame::new(c1)?;
    let target = AxisFrame::new(c2, spec.containment);
    let hits = count_hits::<3, _>(
        derived_seed(spec.scramble_seed, INTERIOR_STREAM),
        spec.log2_samples,
        spec.threads,
        |s| target.contains(frame.interior(s)),
    )?;
    let n = spec.n_samples();
    let hit_fraction = hits as f64 / n as f64;
    Ok(VolumeEstimate {
        value: hit_fraction * c1.volume(),
        hit_fraction,
        n_used: n,
    })
}

/// Estimates the intersection lateral-surface area by sampling both
/// lateral surfaces with independent Sobol streams.
pub fn estimate_intersection_area(
    c1: &Cylinder,
    c2: &Cylinder,
    spec: &QmcSpec,
) -> Result<AreaEstimate> {
    spec.validate()?;
    let frame1 = CylinderFrame::new(c1)?;
    let frame2 = CylinderFrame::new(c2)?;
    let in_c2 = AxisFrame::new(c2, spec.containment);
    let in_c1 = AxisFrame::new(c1, spec.containment);

    let hits1 = count_hits::<2, _>(
        derived_seed(spec.scramble_seed, SURFACE_STREAM_1),
        spec.log2_samples,
        spec.threads,
        |s| in_c2.contains(frame1.surface(s)),
    )?;
    let hits2 = count_hits::<2, _>(
        derived_seed(spec.scramble_seed, SURFACE_STREAM_2),
        spec.log2_samples,
        spec.threads,
        |s| in_c1.contains(frame2.surface(s)),
    )?;

    let n = spec.n_samples();
    let f1 = hits1 as f64 / n as f64;
    let f2 = hits2 as f64 / n as f64;
    Ok(AreaEstimate {
        value: f1 * c1.lateral_area() + f2 * c2.lateral_area(),
        hit_fraction_c1: f1,
        hit_fraction_c2: f2,
        n_used: n,
    })
}

/// Runs both estimators on the reduced configuration and returns the
/// estimates normalized by D³ and D².
pub fn estimate_reduced(delta: f64, diameter: f64, spec: &QmcSpec) -> Result<(f64, f64)> {
    let cfg = ReducedConfig::new(delta)?.with_diameter(diameter)?;
    let (bottom, top) = build_reduced_pair(&cfg);
    let volume = estimate_intersection_volume(&bottom, &top, spec)?;
    let area = estimate_intersection_area(&bottom, &top, spec)?;
    let d3 = diameter * diameter * diameter;
    let d2 = diameter * diameter;
    Ok((volume.value / d3, area.value / d2))
}
