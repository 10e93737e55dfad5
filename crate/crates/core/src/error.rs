use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// The requested construction has no solution (e.g. balance parameters
    /// that no codeword can satisfy).
    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    Length { expected: usize, actual: usize },

    /// A decoder gave up. Distinct from parameter errors so callers can count
    /// it as a channel failure.
    #[error("decoding failed: {0}")]
    Decode(String),

    #[error("malformed bit string: {0:?}")]
    BitParse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
