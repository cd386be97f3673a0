use lpp_core::LppError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    /// A configuration value is missing, malformed or outside its domain.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] LppError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub(crate) fn config_error(field: &str, reason: impl Into<String>) -> ExperimentError {
    ExperimentError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}
