use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range configuration.
    #[error("config error: {message}")]
    Config { key: Option<String>, message: String, line: Option<usize>, column: Option<usize> },
    /// A computation failed or hit a budget; partial outputs may exist.
    #[error("computational error: {0}")]
    Compute(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { key: None, message: message.into(), line: None, column: None }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Config { key, message, line, column } => json!({
                "error": "config",
                "key": key,
                "message": message,
                "line": line,
                "column": column,
            }),
            CliError::Compute(m) => json!({ "error": "compute", "message": m }),
            CliError::Io { path, source } => json!({ "error": "io", "path": path, "message": source.to_string() }),
        }
    }
}
