use thiserror::Error;

/// Errors produced by the inference library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical operation failed (non-SPD matrix, underflow floor hit, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A pipeline stage failed; carries the stage name for diagnostics.
    #[error("pipeline failure in stage `{stage}`: {message}")]
    Pipeline { stage: String, message: String },

    /// Malformed input data (CSV row/column diagnostics).
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn pipeline(stage: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Pipeline {
            stage: stage.into(),
            message: msg.into(),
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
