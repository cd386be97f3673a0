use thiserror::Error;

/// Errors raised by the lattice, DP, queueing and geodesic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LppError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {point} is outside {region}")]
    OutOfRange { point: String, region: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, LppError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LppError {
    LppError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
