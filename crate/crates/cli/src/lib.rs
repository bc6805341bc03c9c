//! Command-line front end for the tensor growth engine.

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("memory budget exceeded after n = {last_n}; series truncated")]
    Truncated { last_n: usize },
    #[error("invariant `{name}` failed: {detail}")]
    Invariant { name: String, detail: String },
    #[error("degenerate weight distribution; null direction {null_direction:?}")]
    Degenerate { null_direction: Vec<i64> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Truncated { .. } => 2,
            CliError::Invariant { .. } => 3,
            CliError::Degenerate { .. } => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
