use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("simplex did not converge within {0} pivots")]
    Nonconvergence(usize),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}
