use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Exit status for I/O failures and failed checks.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for configuration that does not match the schema.
pub const EXIT_SCHEMA: i32 = 2;
/// Exit status for numerical non-convergence.
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Schema { path: PathBuf, line: usize, column: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    /// The flagged report is serialized into the message.
    #[error("numerical non-convergence: {message}\n{report}")]
    NotConverged { message: String, report: String },

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },

    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Input(_) => EXIT_SCHEMA,
            CliError::NotConverged { .. } => EXIT_NOT_CONVERGED,
            CliError::Io { .. } | CliError::ChecksFailed { .. } | CliError::Output(_) => EXIT_FAILURE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Schema error from `serde_json`. Errors raised inside buffered
    /// (tagged) content carry no position or the position of the enclosing
    /// object; unknown names are anchored to their first occurrence in
    /// `text` and position-less errors to the first `"kind"` key.
    pub fn schema(path: impl Into<PathBuf>, text: &str, err: &serde_json::Error) -> Self {
        let message = err.to_string();
        // serde_json appends " at line L column C"; keep only the reason
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        let named = message.starts_with("unknown field") || message.starts_with("unknown variant");
        let (line, column) = match anchor(text, &message, named, err.line() > 0) {
            Some(at) => at,
            None => (err.line(), err.column()),
        };
        CliError::Schema { path: path.into(), line, column, message }
    }

    pub fn not_converged<T: serde::Serialize>(message: impl Into<String>, flagged: &T) -> Self {
        let report = serde_json::to_string_pretty(flagged).unwrap_or_default();
        CliError::NotConverged { message: message.into(), report }
    }
}

fn anchor(text: &str, message: &str, named: bool, positioned: bool) -> Option<(usize, usize)> {
    let key = named.then(|| message.split('`').nth(1)).flatten().map(|k| format!("\"{k}\""));
    let offset = match key.and_then(|k| text.find(&k)) {
        Some(offset) => offset,
        None if positioned => return None,
        None => text.find("\"kind\"")?,
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, column))
}

impl From<qproj::Error> for CliError {
    fn from(err: qproj::Error) -> Self {
        match err {
            qproj::Error::NotConverged(message) => CliError::NotConverged { message, report: String::new() },
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
