use thiserror::Error;

/// Failures that stop a scenario before its checks run. All map to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn compute(key: &str, e: spinfactor::Error) -> Self {
        CliError::Compute(format!("{key}: {e}"))
    }
}
