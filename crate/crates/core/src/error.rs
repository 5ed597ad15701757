use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("rejected input: {0}")]
    InvalidInput(String),

    /// The request is well formed but exceeds what this toolkit will compute.
    #[error("capability limit: {0}")]
    Capability(String),

    /// Numerical integration lost unitarity or failed to converge.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A statistic is undefined for the given data (zero variance, no hits, ...).
    #[error("undefined: {0}")]
    Undefined(String),

    /// A text document failed to parse; `line` is 1-based when known.
    #[error("{}", match .line {
        Some(l) => format!("parse error at line {l}: {message}"),
        None => format!("parse error: {message}"),
    })]
    Parse { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Capability(_) => "capability",
            Error::Integration(_) => "integration",
            Error::Undefined(_) => "undefined",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
