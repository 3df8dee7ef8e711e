use thiserror::Error;

/// Unified error type for the simulator core.
///
/// Variants follow the failure taxonomy used throughout the crate:
/// `Parameter` for malformed or mismatched inputs, `Capability` for
/// requests outside an engine or table's supported range, `Usage` for
/// contract violations such as one-time-pad reuse, `SearchExhausted`
/// for failed randomized searches, and `Invariant` for internal
/// consistency failures that indicate a bug.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn search_exhausted(msg: impl Into<String>) -> Self {
        Error::SearchExhausted(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
