//! CLI error type and process exit codes.

use stimrwa_core::CoreError;

/// Anything that can stop a run. The variant decides the process exit
/// code: configuration problems exit 2, numerical or I/O failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// Core failures reached mid-pipeline are numerical; input problems are
/// caught by config validation before the pipeline starts.
impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
