//! Batch experiment runner: configuration grammar, dispatch, and CSV output.

pub mod config;
pub mod runner;
pub mod table;

use std::path::PathBuf;

use thiserror::Error;

use config::ConfigError;

/// Process exit codes. Usage errors from the argument parser exit with 2.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const NUMERIC: i32 = 5;
    pub const IO: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", join(.0))]
    Parse(Vec<ConfigError>),
    #[error("{}", join(.0))]
    Validation(Vec<ConfigError>),
    #[error("numerical failure: {0}")]
    Numeric(#[from] qdepol::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join(errors: &[ConfigError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn from_config_errors(errors: Vec<ConfigError>) -> Self {
        if errors.iter().any(|e| e.kind == config::ErrorKind::Parse) {
            CliError::Parse(errors)
        } else {
            CliError::Validation(errors)
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit_code::PARSE,
            CliError::Validation(_) => exit_code::VALIDATION,
            CliError::Numeric(_) => exit_code::NUMERIC,
            CliError::Io { .. } => exit_code::IO,
        }
    }
}
