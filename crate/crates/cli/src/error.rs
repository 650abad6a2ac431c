use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] v2vbench::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },
}

impl CliError {
    /// 1 usage, 2 numeric failure, 3 validation failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(v2vbench::Error::Numeric { .. } | v2vbench::Error::Domain { .. }) => 2,
            CliError::Validation { .. } => 3,
            _ => 1,
        }
    }
}
