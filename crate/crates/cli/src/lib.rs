//! Library side of the `specsched` command-line tool: config schema,
//! experiment sweeps, and deterministic output records.

use std::fmt;

pub mod config;
pub mod experiments;
pub mod report;

/// CLI failure classes; [`CliError::exit_code`] fixes the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid configuration (exit code 2).
    Config(String),
    /// Instance rejected by a size guard (exit code 3).
    Guard(String),
    /// I/O failure (exit code 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid config: {msg}"),
            CliError::Guard(msg) => write!(f, "instance guard: {msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<specsched::Error> for CliError {
    fn from(e: specsched::Error) -> Self {
        match e {
            specsched::Error::InstanceTooLarge(msg) => CliError::Guard(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
