//! Error categories mapped to process exit codes.

use annomod_core::CoreError;
use std::path::Path;
use thiserror::Error;

/// A failed command, bucketed by exit code: 1 usage or configuration,
/// 2 data, 3 numerical.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            CoreError::NonFiniteLoss { .. }
            | CoreError::ZeroVariance(_)
            | CoreError::TooFewObservations { .. }
            | CoreError::AgreementUndefined => CliError::Numerical(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Read-side I/O failures concern the data being loaded.
pub fn read_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("cannot read {}: {e}", path.display()))
}

/// Write-side failures mean the configured output location is unusable.
pub fn write_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("cannot write {}: {e}", path.display()))
}
