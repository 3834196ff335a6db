use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("self-test failed: {0}")]
    SelftestFailed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<fracmeas_core::Error> for CliError {
    fn from(e: fracmeas_core::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(std::io::Error::other(e))
    }
}

impl CliError {
    /// 1 usage, 2 validation (and i/o), 3 self-test failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Validation(_) | Self::Io(_) => 2,
            Self::SelftestFailed(_) => 3,
        }
    }
}

impl From<&CliError> for ExitCode {
    fn from(e: &CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
