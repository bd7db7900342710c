//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by geometry construction, quadrature, and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A cylinder axis (or basis direction) has zero length.
    #[error("invalid cylinder axis: segment endpoints coincide")]
    DegenerateAxis,

    /// A cylinder radius was zero, negative, or non-finite.
    #[error("invalid cylinder radius {0}: must be finite and > 0")]
    InvalidRadius(f64),

    /// A coordinate or parameter was NaN or infinite.
    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),

    /// A scalar argument fell outside its mathematical domain.
    #[error("`{name}` = {value} outside [{min}, {max}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The integrator exhausted its refinement levels before reaching the
    /// requested tolerance. Carries the best estimate obtained.
    #[error("quadrature tolerance not reached: best estimate {best} (err ~ {err_estimate})")]
    ToleranceNotReached { best: f64, err_estimate: f64 },

    /// The integrand returned NaN or an infinity inside the interval.
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    /// A configuration parameter was outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
