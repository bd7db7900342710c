//! Exact (quadrature-based) and approximate closed-form evaluation of the
//! reduced intersection volume V′(δ) and lateral surface area A′(δ) for two
//! orthogonal cylinders of equal diameter.
//!
//! Results are dimensionless: volumes are normalized by D³ and areas by D²,
//! with δ = H/D the intersection depth. δ = 1 is the fully intersecting
//! case (the Steinmetz solid), where V′ = 2/3 and A′ = 4 in closed form.

use crate::error::{Error, Result};
use crate::geometry::check_unit_range;
use crate::quadrature::{integrate, QuadratureSpec};

/// Rounding slack absorbed when the volume integrand's radicand dips below
/// zero at its analytic roots.
const RADICAND_TOL: f64 = 1e-14;

/// Rounding slack absorbed when an arccos argument exceeds [−1, 1].
const ACOS_TOL: f64 = 1e-12;

/// Slack allowed on the cross-section radicand before the input is treated
/// as out of domain.
const WIDTH_TOL: f64 = 1e-12;

/// One dimensionless evaluation at a given intersection depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedResult {
    pub delta: f64,
    /// V′ = V/D³ or A′ = A/D².
    pub value: f64,
    /// Quadrature error estimate; exactly 0 on the closed-form fast paths.
    pub err_estimate: f64,
}

/// Coefficients of the reduced volume integrand,
/// √(y′⁴ − Q₁·y′² + Q₂²) on y′ ∈ [0, δ/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeCoefficients {
    /// Q₁ = 1 − δ + δ²/2
    pub q1: f64,
    /// Q₂ = δ/2 − (δ/2)²
    pub q2: f64,
}

impl VolumeCoefficients {
    pub fn new(delta: f64) -> Self {
        let half = 0.5 * delta;
        VolumeCoefficients {
            q1: 1.0 - delta + 0.5 * delta * delta,
            q2: half - half * half,
        }
    }
}

/// Coefficients of the reduced area integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaCoefficients {
    /// Q = 2 − 2δ
    pub q: f64,
    /// x̃′ = 2√(δ − δ²), the abscissa where the shell section ends.
    pub x_tilde: f64,
}

impl AreaCoefficients {
    pub fn new(delta: f64) -> Self {
        AreaCoefficients {
            q: 2.0 - 2.0 * delta,
            x_tilde: (2.0 * (delta - delta * delta).max(0.0).sqrt()).min(1.0),
        }
    }
}

// ── Cross sections ──────────────────────────────────────────────────

fn check_cross_section_args(y_prime: f64, delta: f64) -> Result<()> {
    check_unit_range("delta", delta)?;
    if !y_prime.is_finite() {
        return Err(Error::NonFinite("y_prime"));
    }
    if y_prime < 0.0 || y_prime > 0.5 * delta {
        return Err(Error::OutOfDomain {
            name: "y_prime",
            value: y_prime,
            min: 0.0,
            max: 0.5 * delta,
        });
    }
    Ok(())
}

fn sqrt_clamped(radicand: f64, tol: f64) -> Result<f64> {
    if radicand < -tol {
        return Err(Error::OutOfDomain {
            name: "radicand",
            value: radicand,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Dimensionless cross-section width w′ = √(1 − (2y′ − 1 + δ)²).
pub fn cross_section_width(y_prime: f64, delta: f64) -> Result<f64> {
    check_cross_section_args(y_prime, delta)?;
    let s = 2.0 * y_prime - 1.0 + delta;
    sqrt_clamped(1.0 - s * s, WIDTH_TOL)
}

/// Dimensionless cross-section depth d′ = √(1 − (2y′ + 1 − δ)²).
pub fn cross_section_depth(y_prime: f64, delta: f64) -> Result<f64> {
    check_cross_section_args(y_prime, delta)?;
    let s = 2.0 * y_prime + 1.0 - delta;
    sqrt_clamped(1.0 - s * s, WIDTH_TOL)
}

// ── Exact reduced quantities ────────────────────────────────────────

/// Integrand of the reduced volume; the radicand equals (w′·d′)²/16 and is
/// clamped at −RADICAND_TOL to absorb rounding at its analytic zeros.
pub(crate) fn volume_integrand(y: f64, c: &VolumeCoefficients) -> f64 {
    let y2 = y * y;
    let radicand = y2 * y2 - c.q1 * y2 + c.q2 * c.q2;
    if radicand < -RADICAND_TOL {
        return f64::NAN;
    }
    radicand.max(0.0).sqrt()
}

fn acos_clamped(a: f64) -> f64 {
    if a.abs() > 1.0 + ACOS_TOL {
        return f64::NAN;
    }
    a.clamp(-1.0, 1.0).acos()
}

/// Reduced intersection volume V′(δ) = 8·∫₀^{δ/2} √(y′⁴ − Q₁y′² + Q₂²) dy′.
///
/// Returns exactly 0 at δ = 0 and exactly 2/3 at δ = 1 (the Steinmetz
/// volume); everything else goes through tanh-sinh quadrature.
pub fn reduced_volume(delta: f64, spec: &QuadratureSpec) -> Result<ReducedResult> {
    check_unit_range("delta", delta)?;
    if delta == 0.0 {
        return Ok(ReducedResult {
            delta,
            value: 0.0,
            err_estimate: 0.0,
        });
    }
    if delta == 1.0 {
        return Ok(ReducedResult {
            delta,
            value: 2.0 / 3.0,
            err_estimate: 0.0,
        });
    }
    let c = VolumeCoefficients::new(delta);
    let (value, err) = integrate(|y| volume_integrand(y, &c), 0.0, 0.5 * delta, spec)?;
    Ok(ReducedResult {
        delta,
        value: 8.0 * value,
        err_estimate: 8.0 * err,
    })
}

/// Reduced lateral surface area A′(δ) of the intersection shape.
///
/// For δ ≤ 1/2:  A′ = 2·∫₀^{x̃′} arccos(Q − √(1−x′²)) dx′.
/// For δ > 1/2:  A′ = 2·(∫₀¹ arccos(Q − √(1−x′²)) dx′
///                     − ∫_{x̃′}¹ arccos(Q + √(1−x′²)) dx′).
///
/// Returns exactly 0 at δ = 0 and exactly 4 at δ = 1 (the Steinmetz area).
pub fn reduced_area(delta: f64, spec: &QuadratureSpec) -> Result<ReducedResult> {
    check_unit_range("delta", delta)?;
    if delta == 0.0 {
        return Ok(ReducedResult {
            delta,
            value: 0.0,
            err_estimate: 0.0,
        });
    }
    if delta == 1.0 {
        return Ok(ReducedResult {
            delta,
            value: 4.0,
            err_estimate: 0.0,
        });
    }
    let c = AreaCoefficients::new(delta);
    let circ = |x: f64| (1.0 - x * x).max(0.0).sqrt();

    let (value, err) = if delta <= 0.5 {
        let (v, e) = integrate(|x| acos_clamped(c.q - circ(x)), 0.0, c.x_tilde, spec)?;
        (2.0 * v, 2.0 * e)
    } else {
        let (v1, e1) = integrate(|x| acos_clamped(c.q - circ(x)), 0.0, 1.0, spec)?;
        let (v2, e2) = integrate(|x| acos_clamped(c.q + circ(x)), c.x_tilde, 1.0, spec)?;
        (2.0 * (v1 - v2), 2.0 * (e1 + e2))
    };
    Ok(ReducedResult {
        delta,
        value,
        err_estimate: err,
    })
}

// ── Empirical approximations ────────────────────────────────────────

/// Closed-form approximation V′ ≈ (1 − cos(δπ))/3.
pub fn approx_volume(delta: f64) -> Result<f64> {
    check_unit_range("delta", delta)?;
    Ok((1.0 - (delta * std::f64::consts::PI).cos()) / 3.0)
}

/// Closed-form approximation A′ ≈ 4·sin(δπ/2).
pub fn approx_area(delta: f64) -> Result<f64> {
    check_unit_range("delta", delta)?;
    Ok(4.0 * (delta * std::f64::consts::FRAC_PI_2).sin())
}

/// Signed relative error of an approximation in percent,
/// 100·(exact − approx)/exact. Undefined (None) when `exact` is 0.
pub fn relative_error_pct(exact: f64, approx: f64) -> Option<f64> {
    if exact == 0.0 {
        None
    } else {
        Some(100.0 * (exact - approx) / exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::SplitMix64;

    /// Table of reference values for δ = 0.1, 0.2, …, 0.9 (3 decimals).
    pub const REFERENCE_DELTAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    pub const REFERENCE_VOLUMES: [f64; 9] = [
        0.015, 0.056, 0.120, 0.199, 0.290, 0.387, 0.481, 0.567, 0.635,
    ];
    pub const REFERENCE_AREAS: [f64; 9] = [
        0.612, 1.190, 1.732, 2.232, 2.688, 3.093, 3.440, 3.719, 3.916,
    ];

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn midpoint_oracle<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: u64) -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    /// Independent route to V′: midpoint integration of 2·w′·d′ straight
    /// from the cross-section formulas, no radicand rearrangement.
    fn volume_oracle(delta: f64) -> f64 {
        2.0 * midpoint_oracle(
            |y| {
                cross_section_width(y, delta).unwrap() * cross_section_depth(y, delta).unwrap()
            },
            0.0,
            0.5 * delta,
            2_000_000,
        )
    }

    /// Independent route to A′: midpoint integration of the arccos
    /// integrands.
    fn area_oracle(delta: f64) -> f64 {
        let c = AreaCoefficients::new(delta);
        let circ = |x: f64| (1.0 - x * x).max(0.0).sqrt();
        if delta <= 0.5 {
            2.0 * midpoint_oracle(
                |x| (c.q - circ(x)).clamp(-1.0, 1.0).acos(),
                0.0,
                c.x_tilde,
                2_000_000,
            )
        } else {
            let i1 = midpoint_oracle(
                |x| (c.q - circ(x)).clamp(-1.0, 1.0).acos(),
                0.0,
                1.0,
                2_000_000,
            );
            let i2 = midpoint_oracle(
                |x| (c.q + circ(x)).clamp(-1.0, 1.0).acos(),
                c.x_tilde,
                1.0,
                2_000_000,
            );
            2.0 * (i1 - i2)
        }
    }

    #[test]
    fn cross_section_trivial_values() {
        assert_eq!(cross_section_width(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(cross_section_width(0.5, 1.0).unwrap(), 0.0);
        let expected = (1.0f64 - 0.16).sqrt();
        assert!((cross_section_width(0.1, 0.4).unwrap() - expected).abs() < 1e-15);

        assert_eq!(cross_section_depth(0.2, 0.4).unwrap(), 0.0);
        assert_eq!(cross_section_depth(0.0, 1.0).unwrap(), 1.0);
        let expected = (1.0f64 - 0.36).sqrt();
        assert!((cross_section_depth(0.1, 0.4).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn cross_section_domain_errors() {
        assert!(cross_section_width(-0.01, 0.4).is_err());
        assert!(cross_section_width(0.21, 0.4).is_err());
        assert!(cross_section_depth(0.3, 0.4).is_err());
        assert!(cross_section_width(0.0, 1.5).is_err());
    }

    #[test]
    fn radicand_matches_cross_section_product() {
        // (w′·d′)² = 16·(y′⁴ − Q₁y′² + Q₂²) on 1000 random in-domain points.
        let mut rng = SplitMix64::new(314159);
        for _ in 0..1000 {
            let delta = rng.next_f64();
            let y = rng.next_f64() * 0.5 * delta;
            let w = cross_section_width(y, delta).unwrap();
            let d = cross_section_depth(y, delta).unwrap();
            let c = VolumeCoefficients::new(delta);
            let y2 = y * y;
            let radicand = y2 * y2 - c.q1 * y2 + c.q2 * c.q2;
            assert!(
                ((w * d).powi(2) - 16.0 * radicand).abs() < 1e-12,
                "delta={delta} y={y}"
            );
        }
    }

    #[test]
    fn coefficient_ranges() {
        for i in 0..=100 {
            let delta = i as f64 / 100.0;
            let v = VolumeCoefficients::new(delta);
            assert!((0.5..=1.0).contains(&v.q1));
            assert!((0.0..=0.25).contains(&v.q2));
            let a = AreaCoefficients::new(delta);
            assert!((0.0..=2.0).contains(&a.q));
            assert!((0.0..=1.0).contains(&a.x_tilde));
        }
        assert_eq!(AreaCoefficients::new(0.5).x_tilde, 1.0);
    }

    #[test]
    fn volume_reference_values() {
        for (&delta, &expected) in REFERENCE_DELTAS.iter().zip(&REFERENCE_VOLUMES) {
            let r = reduced_volume(delta, &spec()).unwrap();
            assert!(
                (r.value - expected).abs() < 5e-4,
                "delta={delta}: {} vs {expected}",
                r.value
            );
        }
    }

    #[test]
    fn area_reference_values() {
        for (&delta, &expected) in REFERENCE_DELTAS.iter().zip(&REFERENCE_AREAS) {
            let r = reduced_area(delta, &spec()).unwrap();
            assert!(
                (r.value - expected).abs() < 5e-4,
                "delta={delta}: {} vs {expected}",
                r.value
            );
        }
    }

    #[test]
    fn volume_closed_forms() {
        let r0 = reduced_volume(0.0, &spec()).unwrap();
        assert_eq!(r0.value, 0.0);
        assert_eq!(r0.err_estimate, 0.0);
        let r1 = reduced_volume(1.0, &spec()).unwrap();
        assert_eq!(r1.value, 2.0 / 3.0);
        assert_eq!(r1.err_estimate, 0.0);
    }

    #[test]
    fn area_closed_forms() {
        assert_eq!(reduced_area(0.0, &spec()).unwrap().value, 0.0);
        assert_eq!(reduced_area(1.0, &spec()).unwrap().value, 4.0);
    }

    #[test]
    fn quadrature_agrees_with_midpoint_oracle() {
        for delta in [0.17, 0.5, 0.73] {
            let v = reduced_volume(delta, &spec()).unwrap().value;
            let vo = volume_oracle(delta);
            assert!((v - vo).abs() < 1e-6, "delta={delta}: {v} vs oracle {vo}");
            let a = reduced_area(delta, &spec()).unwrap().value;
            let ao = area_oracle(delta);
            assert!((a - ao).abs() < 1e-6, "delta={delta}: {a} vs oracle {ao}");
        }
    }

    #[test]
    fn monotonic_in_delta() {
        let mut prev_v = -1.0;
        let mut prev_a = -1.0;
        for i in 0..=100 {
            let delta = i as f64 / 100.0;
            let v = reduced_volume(delta, &spec()).unwrap().value;
            let a = reduced_area(delta, &spec()).unwrap().value;
            assert!(v > prev_v, "volume not increasing at delta={delta}");
            assert!(a > prev_a, "area not increasing at delta={delta}");
            assert!((0.0..=2.0 / 3.0 + 1e-9).contains(&v));
            assert!((0.0..=4.0 + 1e-9).contains(&a));
            prev_v = v;
            prev_a = a;
        }
    }

    #[test]
    fn area_branch_continuity() {
        let below = reduced_area(0.5, &spec()).unwrap().value;
        let above = reduced_area(0.5 + 1e-9, &spec()).unwrap().value;
        assert!((below - above).abs() < 1e-6, "{below} vs {above}");
    }

    #[test]
    fn volume_not_point_symmetric() {
        let v4 = reduced_volume(0.4, &spec()).unwrap().value;
        let v5 = reduced_volume(0.5, &spec()).unwrap().value;
        let v6 = reduced_volume(0.6, &spec()).unwrap().value;
        let asym = ((v6 - v5) - (v5 - v4)).abs();
        assert!(asym > 0.001, "difference of differences = {asym}");
    }

    #[test]
    fn approximation_endpoint_values() {
        assert_eq!(approx_volume(0.0).unwrap(), 0.0);
        assert!((approx_volume(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((approx_volume(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((approx_area(1.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((approx_area(0.5).unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn approximation_error_at_reference_depth() {
        let exact_v = reduced_volume(0.4, &spec()).unwrap().value;
        let err_v = relative_error_pct(exact_v, approx_volume(0.4).unwrap()).unwrap();
        assert!((err_v - (-15.4)).abs() < 0.1, "volume err {err_v}%");

        let exact_a = reduced_area(0.4, &spec()).unwrap().value;
        let err_a = relative_error_pct(exact_a, approx_area(0.4).unwrap()).unwrap();
        assert!((err_a - (-5.3)).abs() < 0.1, "area err {err_a}%");
    }

    #[test]
    fn approximation_error_envelope() {
        for i in 1..=100 {
            let delta = i as f64 / 100.0;
            let v = reduced_volume(delta, &spec()).unwrap().value;
            let a = reduced_area(delta, &spec()).unwrap().value;
            let ev = relative_error_pct(v, approx_volume(delta).unwrap()).unwrap();
            let ea = relative_error_pct(a, approx_area(delta).unwrap()).unwrap();
            assert!(ev.abs() <= 16.0, "volume err {ev}% at delta={delta}");
            assert!(ea.abs() <= 6.0, "area err {ea}% at delta={delta}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(reduced_volume(-0.1, &spec()).is_err());
        assert!(reduced_volume(1.1, &spec()).is_err());
        assert!(reduced_area(f64::NAN, &spec()).is_err());
        assert!(approx_volume(2.0).is_err());
        assert!(approx_area(-1.0).is_err());
    }
}
