use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),
    #[error(transparent)]
    Core(#[from] kloodist_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0} hard assertion(s) failed")]
    HardFailure(usize),
}

impl CliError {
    /// 2 for anything wrong with the configuration, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
