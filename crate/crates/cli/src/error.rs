use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] susmap::Error),

    /// Configuration problem; `field` is a dotted path into the config.
    #[error("config {field}: {message}")]
    Config { field: String, message: String },

    #[error("missing prerequisite: {message} (run `susmap {command}` first)")]
    Missing { command: &'static str, message: String },

    #[error("{failed} of {total} tasks failed; see the manifest")]
    Partial { failed: usize, total: usize },

    #[error("{path}: {message}")]
    File { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn file(path: &std::path::Path, message: impl ToString) -> Self {
        Self::File {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(e) => e.kind(),
            Self::Config { .. } => "config",
            Self::Missing { .. } => "missing_prerequisite",
            Self::Partial { .. } => "partial_failure",
            Self::File { .. } => "file",
            Self::Io(_) => "io",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            Self::Config { field, .. } => obj["field"] = field.clone().into(),
            Self::Missing { command, .. } => obj["command"] = (*command).into(),
            Self::Core(susmap::Error::Parse { line: Some(l), .. }) => obj["line"] = (*l).into(),
            _ => {}
        }
        serde_json::json!({ "error": obj }).to_string()
    }
}
