use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("X and Z checks do not commute (row {x_row} of gx, row {z_row} of gz)")]
    NonCommuting { x_row: usize, z_row: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("inconsistent syndrome: {0}")]
    InconsistentSyndrome(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
