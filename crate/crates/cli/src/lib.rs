//! Library half of the `stabreg` binary: configuration handling, output
//! formatting, and one entry point per subcommand. The binary is a thin
//! argument-parsing shell over these functions so that integration tests can
//! drive the exact command implementations in process.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

use stabreg_core::error::Error as CoreError;

/// Command failure carrying the process exit code contract:
/// 1 validation or I/O, 2 numerical failure, 3 invariant failure.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Invariant(msg) => write!(f, "invariant failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_) | CoreError::InvalidDimension(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
