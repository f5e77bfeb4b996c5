use thiserror::Error;

/// Errors produced by field construction, solvers, and the scenario runner.
#[derive(Debug, Error)]
pub enum QhError {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("phase unwrap aborted: {0}")]
    PhaseUnwrap(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric abort: {0}")]
    Numeric(String),

    #[error("invariant `{name}` failed: {detail}")]
    Invariant { name: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl QhError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        QhError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            QhError::Config { .. } | QhError::Json(_) | QhError::Grid(_) => 2,
            QhError::Invariant { .. } => 3,
            QhError::Numeric(_) | QhError::NonFinite(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, QhError>;
