use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] firmlab::Error),
}

impl CliError {
    /// 2 for anything that stopped the task from running, 3 for numerical divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(firmlab::Error::Divergence { .. }) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
