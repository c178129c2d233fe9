//! Error type for the command-line harness, with stable exit codes.

use fedcoalitions::Error as CoreError;

/// Exit code for invalid input: malformed documents, bad parameters,
/// graph/partition validation failures.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for a tripped safety limit (enumeration or size guard).
pub const EXIT_LIMIT: u8 = 3;
/// Exit code for filesystem problems.
pub const EXIT_IO: u8 = 4;

/// Anything that can abort a CLI run, bucketed by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The input (document, flag, or derived graph) is invalid.
    #[error("{0}")]
    Validation(String),
    /// A guard against runaway enumeration fired; rerun with a higher limit
    /// or a smaller instance.
    #[error("{0}")]
    Limit(String),
    /// Reading or writing a file failed.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Limit(_) => EXIT_LIMIT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SizeLimit { .. } | CoreError::EnumerationLimit { .. } => {
                CliError::Limit(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("invalid JSON document: {e}"))
    }
}
