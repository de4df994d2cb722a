//! Polynomial side of the threshold direct product argument, checked
//! numerically: Chebyshev growth and extremality, the extremal jump of
//! integer-constrained polynomials as an exact linear program, and the
//! block-fullness estimate used when folding `k` instances into one.

pub mod blocks;
pub mod cheb;
pub mod cr;
pub mod error;
pub mod extremal;
pub mod lp;
pub mod simplex;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
pub use suite::{run_suite, Suite, SuiteReport};
