use thiserror::Error;

/// Errors raised by the coordinate maps, integrals and flows.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The two bodies (or the body and a centre) coincide.
    #[error("collision: {0}")]
    Collision(String),
    /// An iterative or adaptive procedure failed to reach its tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

pub(crate) fn collision(msg: impl Into<String>) -> Error {
    Error::Collision(msg.into())
}
