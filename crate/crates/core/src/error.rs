use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument refers to something that does not exist or violates a precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// Externally supplied data (paths, outcome maps) is malformed.
    #[error("malformed data: {0}")]
    Format(String),

    /// An exact computation would exceed its configured size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
