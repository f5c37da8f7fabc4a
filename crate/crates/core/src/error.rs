//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid value: {0}")]
    Validity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular normalization: trace {trace:e} is below the cutoff")]
    SingularNormalization { trace: f64 },

    #[error("unsupported mode: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration diverged at t = {time}: {reason}")]
    IntegrationDiverged { time: f64, reason: String },

    #[error("exponent growth {growth:.3} exceeds the overflow cap {cap}")]
    Overflow { growth: f64, cap: f64 },

    #[error("no crossing found on [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
