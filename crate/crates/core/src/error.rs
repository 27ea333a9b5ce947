//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be an integer >= 3, got {0}")]
    DimensionTooSmall(u32),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("incompatible fields: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("positivity violated: {0}")]
    NonPositive(String),
    #[error("center must lie on the symmetry axis: {0}")]
    OffAxis(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("no sign change in amplitude bracket: {0}")]
    NoBracket(String),
    #[error("time step failed: {0}")]
    StepFailed(String),
    #[error("resolution check failed: {0}")]
    Unresolved(String),
}

pub type Result<T> = std::result::Result<T, Error>;
