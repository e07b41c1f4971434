use thiserror::Error;

use crate::tt::Violation;

/// Errors produced by the tensor-train routines.
#[derive(Debug, Error)]
pub enum TtError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index out of bounds: {0}")]
    IndexOutOfBounds(String),

    #[error("invalid tensor train: {0}")]
    Invalid(Violation),

    #[error("dense materialization needs {entries} entries, cap is {cap}")]
    DenseCapExceeded { entries: u128, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("reference tensor has zero norm")]
    ZeroNorm,

    #[error("two-sided sketch at bond {bond} is numerically zero")]
    DegenerateSketch { bond: usize },

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("GMRES breakdown at iteration {iteration} with residual {residual:e}")]
    Breakdown { iteration: usize, residual: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, TtError>;
