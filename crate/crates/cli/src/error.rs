use tandim_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// Estimates out of order: an implementation bug, not a property of the
    /// measure.
    #[error("ordering invariant violated: {0}")]
    Invariant(String),
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(Error::Parse { .. }) => 3,
            CliError::Core(Error::Resolution(_) | Error::Degenerate(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Invariant(_) => 5,
        }
    }
}
