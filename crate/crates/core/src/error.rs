use thiserror::Error;

/// Errors raised by the partition solvers and the spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An interval falls outside the domain of a set-function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A root bracket, quadrature or bisection failed to converge.
    #[error("numerical failure: {0}")]
    Numerics(String),
    /// Partitions or families with mismatched domains or cell counts.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Consecutive members of a family differ in monotonicity or empty-set value.
    #[error("incompatible family: {0}")]
    IncompatibleFamily(String),
    #[error("tolerance not reached: residual {residual:e} exceeds {target:e}")]
    ToleranceNotReached { residual: f64, target: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    /// Malformed profiles, coefficients or configuration values.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
