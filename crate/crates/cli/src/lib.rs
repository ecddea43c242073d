//! Command implementations for the `dimcut` binary, kept in a library so
//! integration tests can drive them directly.

pub mod bench;
pub mod commands;
pub mod output;
pub mod synth;

/// Splits command failures into usage errors (exit 2) and runtime errors
/// (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<dimcut_core::Error> for CliError {
    fn from(e: dimcut_core::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
