use thiserror::Error;

/// Errors produced by the graph engines, parsers and workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A lookup table or buffer would exceed the configured memory guard.
    #[error("resource limit: {what} needs {required} but the limit is {limit}")]
    ResourceLimit {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
