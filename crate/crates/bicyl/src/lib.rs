//! Intersection volume and lateral surface area of two finite cylinders.
//!
//! Three complementary evaluation routes:
//!
//! * **Exact** — for the orthogonal, equal-diameter configuration the
//!   reduced volume V′(δ) and surface area A′(δ) are one-dimensional
//!   integrals in the intersection depth δ = H/D, evaluated here with
//!   tanh-sinh quadrature ([`analytic`], [`quadrature`]).
//! * **Approximate** — closed-form fits (1 − cos δπ)/3 and 4·sin(δπ/2)
//!   give instant evaluations within a few percent ([`analytic`]).
//! * **Stochastic** — Sobol quasi-Monte Carlo estimators handle two
//!   completely arbitrary finite cylinders ([`lowdisc`], [`qmc`]).
//!
//! The `bicyl` binary exposes all three as subcommands; see [`cli`].

pub mod analytic;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod lowdisc;
pub mod qmc;
pub mod quadrature;

#[cfg(test)]
mod testutil;

pub use analytic::{
    approx_area, approx_volume, reduced_area, reduced_volume, AreaCoefficients, ReducedResult,
    VolumeCoefficients,
};
pub use error::{Error, Result};
pub use geometry::{
    build_reduced_pair, orthonormal_basis, point_to_segment_distance, Cylinder, ReducedConfig,
    Vec3,
};
pub use lowdisc::{sobol_block, SobolSampler};
pub use qmc::{
    estimate_intersection_area, estimate_intersection_volume, estimate_reduced,
    sample_cylinder_interior, sample_cylinder_surface, AreaEstimate, Containment, QmcSpec,
    VolumeEstimate,
};
pub use quadrature::{integrate, QuadratureSpec};
