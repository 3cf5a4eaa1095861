use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of the operands do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violates a documented precondition (non-Hermitian input, NaN, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The number of reduced generators is outside the admissible range.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// The reduction matrix is numerically zero; no certificate bounds can be formed.
    #[error("reduction matrix is numerically zero (largest singular value {0:e})")]
    ZeroMatrix(f64),

    #[error("invalid system: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
