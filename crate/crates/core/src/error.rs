use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("backend mismatch: cannot combine {left} and {right} values")]
    BackendMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("operation requires the exact backend: {0}")]
    ExactOnly(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no separating functional: {0}")]
    NoSeparatingFunctional(String),

    #[error("malformed scalar {text:?}: {reason}")]
    MalformedScalar { text: String, reason: String },

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
