use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("constraint violation: support of size {size} exceeds cardinality budget {k}")]
    ConstraintViolation { size: usize, k: usize },

    #[error("inconsistent bounds: upper bound {upper} is below certified lower bound {lower}")]
    InconsistentBounds { lower: f64, upper: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("problem too large for exhaustive enumeration: {0}")]
    SizeCap(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
