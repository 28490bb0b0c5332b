use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("array must have at least one element")]
    EmptyArray,
    #[error("element spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("quantization bits must be in 1..=30, got {0}")]
    InvalidBits(u32),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("composite channel gain is zero")]
    ZeroGain,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
