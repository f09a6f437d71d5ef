use thiserror::Error;

/// Errors raised when constructing or evaluating domain values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("beta must be positive, got {0}")]
    InvalidBeta(f64),
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("probability {0} outside the admissible range")]
    ProbabilityOutOfRange(f64),
    #[error("invalid interval for {name}: [{lo}, {hi}]")]
    InvalidInterval {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("objective weights must be non-negative and not all zero")]
    InvalidWeights,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("search depth must be at least 2, got {0}")]
    InvalidDepth(u32),
    #[error("nominal parameters lie outside the parameter bounds")]
    NominalOutOfBounds,
    #[error("invalid grid: every axis needs at least 2 points")]
    InvalidGrid,
}

impl ModelError {
    /// Name of the offending parameter, when the error concerns one.
    pub fn field_name(&self) -> Option<&'static str> {
        match self {
            Self::InvalidAlpha(_) => Some("alpha"),
            Self::InvalidBeta(_) => Some("beta"),
            Self::InvalidDelta(_) => Some("delta"),
            Self::InvalidInterval { name, .. } => Some(name),
            _ => None,
        }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
