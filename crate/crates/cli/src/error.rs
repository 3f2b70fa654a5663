use std::fmt::Display;

use thiserror::Error;

/// Errors that stop a command. All of them exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}, column {column}, field `{field}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] wignerlab_core::Error),
}

impl CliError {
    pub fn field(field: &str, message: impl Display) -> Self {
        CliError::Field {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    pub fn io(path: &str, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }
}
