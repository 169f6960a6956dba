use std::path::PathBuf;

use kinsplit_core::KineticError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for a failed internal check,
    /// 4 for file-system errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<KineticError> for CliError {
    fn from(e: KineticError) -> Self {
        match e {
            KineticError::InvariantViolation(msg) => CliError::Invariant(msg),
            KineticError::LengthMismatch { .. } | KineticError::WrongGrid { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
