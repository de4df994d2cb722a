//! Explicit small-size models of the fixed-weight input space used in the
//! threshold direct product argument.
//!
//! Everything is built as dense real or complex matrices: the chains of
//! fixed-ones subspaces, their phase-signed layers, the k-fold aggregates, the
//! input-register recast of a query algorithm, and the potential function.
//! Each claim is then checked by direct computation.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod recast;
pub mod signed;
pub mod space;
pub mod suite;

pub use error::{Error, Result};
pub use space::{implicit_threshold, InputSpace};
