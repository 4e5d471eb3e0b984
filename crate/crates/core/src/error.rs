use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum WdsError {
    #[error("bandwidth compression factor {0} outside (0, 1]")]
    InvalidBcf(f64),

    #[error("invalid waveform configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid band plan: {0}")]
    InvalidPlan(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("transform size {size} exceeds the configured maximum {max}")]
    TransformTooLarge { size: usize, max: usize },

    #[error("sub-bands overlap: sub-band {index} starts before the previous one ends")]
    OverlappingSubbands { index: usize },

    #[error("invalid channel model: {0}")]
    InvalidChannel(String),

    #[error("channel matrix is singular or ill-conditioned (condition number {condition:e})")]
    SingularChannel { condition: f64 },

    #[error("correlation matrix is singular (pivot {pivot:e} below {tolerance:e})")]
    SingularCorrelation { pivot: f64, tolerance: f64 },

    #[error("sphere decoder found no candidate inside radius {radius:e}")]
    NoSolution { radius: f64 },

    #[error("invalid chaotic state: {0}")]
    InvalidChaoticState(String),

    #[error("no key emitted after {0} iterations")]
    KeyStarvation(u64),

    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("dataset format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, WdsError>;
