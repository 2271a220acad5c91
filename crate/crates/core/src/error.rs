use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        last: Vec<f64>,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
