use fibrum_core::Error as CoreError;
use serde_json::json;

/// Exit status for precondition, format and input errors.
pub const EXIT_PRECONDITION: i32 = 1;
/// Exit status for failed internal identities.
pub const EXIT_INTERNAL: i32 = 2;
/// Exit status of `verify` when some criterion fails.
pub const EXIT_CRITERIA: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema mismatch: expected {expected}, found {found}")]
    Schema { expected: String, found: String },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Json(_) => "format",
            CliError::Schema { .. } => "schema",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Internal(_)) => EXIT_INTERNAL,
            _ => EXIT_PRECONDITION,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": crate::formats::SCHEMA,
            "kind": "error",
            "data": { "kind": self.kind(), "message": self.to_string() },
        })
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
