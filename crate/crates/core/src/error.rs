use thiserror::Error;

/// Errors raised by library operations. Report-returning operations (dataset
/// validation, axiom checks, audits) never use this for a negative verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent shapes or references between objects.
    #[error("structural error: {0}")]
    Structure(String),
    /// A computation hit a configured resource cap.
    #[error("resource limit reached: {0}")]
    Resource(String),
    /// A state that valid inputs cannot produce.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn structure(msg: impl Into<String>) -> Error {
    Error::Structure(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
