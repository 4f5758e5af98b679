use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("nonpositive transformation values in fit window: {0}")]
    NonpositiveValues(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
