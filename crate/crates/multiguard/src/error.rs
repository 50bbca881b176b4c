use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation
    /// (NaN input, probability outside [0, 1], nonpositive shape parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// A point's dimension does not match the classifier's.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Invalid configuration or invalid arguments to an operation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A record in a line-oriented file failed to parse or validate.
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    /// A rank or index argument is out of range.
    #[error("index out of range: {0}")]
    IndexRange(String),

    /// The operation is not defined for this input (e.g. exact label
    /// probabilities in more than one dimension).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn record(line: usize, msg: impl Into<String>) -> Self {
        Error::Record {
            line,
            message: msg.into(),
        }
    }
}
