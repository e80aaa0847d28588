use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in {file}: {field}: {message}")]
    Config {
        file: String,
        field: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Aborted(flatrack_core::Error),
    #[error("analysis infeasible: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn config(file: impl Into<String>, field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            file: file.into(),
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for aborted simulations, 4 for
    /// infeasible analyses; IO failures share the configuration code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Aborted(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}
