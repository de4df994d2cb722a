//! Bounded matrix-vector products `y = min(Ax, b)` evaluated under a space
//! budget, with every input access charged to a query ledger.

pub mod error;
pub mod model;
pub mod linsys;
pub mod qsim;
pub mod sweep;

pub use error::{Error, Result};
