//! Command-line front end: scenario registry, config files, validation
//! suite and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;
pub mod registry;
pub mod validate;

use soliton_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 1 config, 2 validation, 3 singularity in window.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Core(e) => match e {
                CoreError::Singularity { .. } => 3,
                CoreError::NonConvergence { .. }
                | CoreError::StepSizeUnderflow { .. }
                | CoreError::StepBudget { .. } => 2,
                _ => 1,
            },
        }
    }
}
