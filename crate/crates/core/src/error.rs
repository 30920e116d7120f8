use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input is well-formed but outside the domain of the operation.
    #[error("{0}")]
    Domain(String),
    /// Bad arguments or unparseable input.
    #[error("{0}")]
    Usage(String),
    /// The map input does not describe a rotation system.
    #[error("malformed map: {0}")]
    Malformed(String),
    /// A well-formed map that fails a marked-orientation invariant.
    #[error("invalid orientation: {0}")]
    Invalid(String),
    /// An internal consistency assertion failed.
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
