use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need 1 <= t <= n/2, got n={n}, t={t}")]
    InvalidSize { n: usize, t: usize },

    #[error("dimension {size} exceeds the cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("ambiguous rank: residual norm {residual:e} in {label}")]
    AmbiguousRank { label: String, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
