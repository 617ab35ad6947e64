use alloc::string::String;

use crate::expr::ParseError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("conjugate exponent is unbounded: minimum exponent {min} is not above 1")]
    ConjugateUnbounded { min: f64 },
    #[error("exponent maximum {max} is not below the dimension {dimension}")]
    Supercritical { max: f64, dimension: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("resolution {0} is below the minimum of 2")]
    InvalidResolution(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("argument {arg} exceeds the overflow cap {cap}")]
    Overflow { arg: f64, cap: f64 },
    #[error("singular matrix at pivot {0}")]
    Singular(usize),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
