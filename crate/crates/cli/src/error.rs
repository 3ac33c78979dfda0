use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("format: {0}")]
    Format(String),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Format(_) | CliError::Io(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<nodeloc_core::Error> for CliError {
    fn from(e: nodeloc_core::Error) -> Self {
        use nodeloc_core::Error as E;
        match e {
            E::Input(m) => CliError::Usage(m),
            E::Format(m) => CliError::Format(m),
            E::Capacity(m) => CliError::Capacity(m),
            E::Invariant(m) => CliError::Invariant(m),
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub(crate) fn format(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}
