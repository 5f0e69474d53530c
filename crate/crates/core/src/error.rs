use thiserror::Error;

/// Errors produced by the bellkit library.
#[derive(Debug, Error)]
pub enum Error {
    /// An outcome, setting or tensor index fell outside its range.
    #[error("index out of range: {0}")]
    Index(String),
    /// Inputs are well-formed but the requested quantity is undefined for them.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation exceeds the supported problem size.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn index(msg: impl Into<String>) -> Error {
    Error::Index(msg.into())
}
