use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GpkError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// The requested computation exceeds a desk-scale enumeration limit.
    #[error("resource limit: {what} is {actual}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    /// An observation contradicts the promise an algorithm was run under.
    #[error("promise violated: {0}")]
    InvalidPromise(String),

    #[error("call budget of {limit} GPK applications exhausted")]
    BudgetExceeded { limit: u64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GpkError {
    fn from(e: std::io::Error) -> Self {
        GpkError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GpkError>;
