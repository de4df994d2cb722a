use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("grover schedule requires a weight of at least 1")]
    WeightZero,

    #[error("weight {weight} exceeds range size {n}")]
    WeightTooLarge { weight: usize, n: usize },

    #[error("search range is empty")]
    EmptyRange,

    #[error("space budget {given} is below the minimum {required}")]
    SpaceTooSmall { given: u64, required: u64 },

    #[error("statevector simulation of size {size} exceeds the cap {cap}")]
    SimulationTooLarge { size: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} distinct axis values, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
