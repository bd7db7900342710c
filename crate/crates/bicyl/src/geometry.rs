//! Core vector and cylinder types, point-to-segment distance, orthonormal
//! basis construction, and the reduced-case scene builder.
//!
//! All types are immutable value types and all operations are pure
//! functions, so everything here is safe to use from any number of threads.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Threshold below which an axis direction is treated as parallel to ±Z
/// when picking the first basis vector.
const Z_ALIGNED_TOL: f64 = 1e-9;

// ── Vec3 ────────────────────────────────────────────────────────────

/// A point or direction in 3-D world space (binary64 components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(
            x.is_finite() && y.is_finite() && z.is_finite(),
            "non-finite Vec3 component"
        );
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    #[inline]
    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * rhs.z - self.z * rhs.y,
            y: self.z * rhs.x - self.x * rhs.z,
            z: self.x * rhs.y - self.y * rhs.x,
        }
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector in the same direction, or an error for the zero vector.
    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateAxis);
        }
        Ok(self / n)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z,
        }
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
            z: self.z - rhs.z,
        }
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3 {
            x: self.x / s,
            y: self.y / s,
            z: self.z / s,
        }
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

// ── Cylinder ────────────────────────────────────────────────────────

/// A finite cylinder given by its axis segment and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    a: Vec3,
    b: Vec3,
    r: f64,
}

impl Cylinder {
    /// Builds a cylinder, rejecting degenerate axes (`a == b`), non-positive
    /// radii, and non-finite inputs.
    pub fn new(a: Vec3, b: Vec3, r: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("cylinder axis endpoint"));
        }
        if (b - a).norm_squared() == 0.0 {
            return Err(Error::DegenerateAxis);
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidRadius(r));
        }
        Ok(Cylinder { a, b, r })
    }

    #[inline]
    pub fn axis_start(&self) -> Vec3 {
        self.a
    }

    #[inline]
    pub fn axis_end(&self) -> Vec3 {
        self.b
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.r
    }

    #[inline]
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Unit vector from `a` to `b`.
    pub fn direction(&self) -> Vec3 {
        (self.b - self.a).normalized().expect("axis validated on construction")
    }

    /// Full cylinder volume, π r² L.
    pub fn volume(&self) -> f64 {
        std::f64::consts::PI * self.r * self.r * self.length()
    }

    /// Lateral surface area, 2 π r L (end caps excluded).
    pub fn lateral_area(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.r * self.length()
    }
}

// ── Reduced configuration ───────────────────────────────────────────

/// The dimensionless orthogonal equal-diameter configuration: two cylinders
/// of common diameter `D` with perpendicular axes, overlapping to an
/// intersection depth `delta` = H/D.
///
/// `length_factor` sets the cylinder length as a multiple of `D`. It must be
/// at least 2 so the overlap region stays far from the segment endpoints,
/// which makes segment-distance containment equal infinite-cylinder
/// containment inside the overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedConfig {
    delta: f64,
    diameter: f64,
    length_factor: f64,
}

impl ReducedConfig {
    pub const DEFAULT_DIAMETER: f64 = 1.0;
    pub const DEFAULT_LENGTH_FACTOR: f64 = 4.0;

    /// Configuration with diameter 1 and length factor 4.
    pub fn new(delta: f64) -> Result<Self> {
        check_unit_range("delta", delta)?;
        Ok(ReducedConfig {
            delta,
            diameter: Self::DEFAULT_DIAMETER,
            length_factor: Self::DEFAULT_LENGTH_FACTOR,
        })
    }

    pub fn with_diameter(mut self, diameter: f64) -> Result<Self> {
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diameter {diameter} must be finite and > 0"
            )));
        }
        self.diameter = diameter;
        Ok(self)
    }

    pub fn with_length_factor(mut self, length_factor: f64) -> Result<Self> {
        if !(length_factor.is_finite() && length_factor >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "length_factor {length_factor} must be finite and >= 2"
            )));
        }
        self.length_factor = length_factor;
        Ok(self)
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    #[inline]
    pub fn length_factor(&self) -> f64 {
        self.length_factor
    }
}

pub(crate) fn check_unit_range(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfDomain {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

// ── Operations ──────────────────────────────────────────────────────

/// Distance from `p` to the closest point of segment `ab`.
///
/// The closest point is `a + t'·(b−a)` with `t' = clamp((p−a)·(b−a)/‖b−a‖², 0, 1)`.
pub fn point_to_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> Result<f64> {
    let ab = b - a;
    let ab_dot = ab.norm_squared();
    if ab_dot == 0.0 {
        return Err(Error::DegenerateAxis);
    }
    let t = (p - a).dot(ab) / ab_dot;
    let t_clamped = t.clamp(0.0, 1.0);
    Ok((p - (a + ab * t_clamped)).norm())
}

/// Right-handed orthonormal basis `(u, v, d)` with `d` along `direction`.
///
/// `u` is chosen deterministically: `(1,0,0)` when the direction is within
/// `1e-9` of ±Z, otherwise the normalized cross product of the direction
/// with Z. `v = d × u`.
pub fn orthonormal_basis(direction: Vec3) -> Result<(Vec3, Vec3, Vec3)> {
    let d = direction.normalized()?;
    let z = Vec3::new(0.0, 0.0, 1.0);
    let near_z = (d - z).norm() < Z_ALIGNED_TOL || (d + z).norm() < Z_ALIGNED_TOL;
    let u = if near_z {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        d.cross(z).normalized()?
    };
    let v = d.cross(u);
    Ok((u, v, d))
}

/// World-space cylinder pair realizing a reduced configuration.
///
/// The bottom cylinder runs along X at height `y = H/2 − R`, the top along Z
/// at `y = R − H/2`, with `H = delta·D` and `R = D/2`; both have radius `R`
/// and length `length_factor·D`, centered over the origin. Their overlap
/// spans `y ∈ [−H/2, +H/2]`.
pub fn build_reduced_pair(cfg: &ReducedConfig) -> (Cylinder, Cylinder) {
    let d = cfg.diameter();
    let r = 0.5 * d;
    let h = cfg.delta() * d;
    let half_len = 0.5 * cfg.length_factor() * d;

    let y_bottom = 0.5 * h - r;
    let y_top = r - 0.5 * h;

    let bottom = Cylinder::new(
        Vec3::new(-half_len, y_bottom, 0.0),
        Vec3::new(half_len, y_bottom, 0.0),
        r,
    )
    .expect("reduced bottom cylinder is valid by construction");
    let top = Cylinder::new(
        Vec3::new(0.0, y_top, -half_len),
        Vec3::new(0.0, y_top, half_len),
        r,
    )
    .expect("reduced top cylinder is valid by construction");
    (bottom, top)
}
