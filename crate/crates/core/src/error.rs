use thiserror::Error;

/// Errors shared by every operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The instance is too large for an exact routine.
    #[error("refused: {0}")]
    Refused(String),
    /// A post-condition check failed on a produced artifact.
    #[error("verification failed: {0}")]
    Verification(String),
    /// A randomized procedure ran out of attempts.
    #[error("retry budget exhausted after {attempts} attempts: {detail}")]
    RetryExhausted { attempts: usize, detail: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
