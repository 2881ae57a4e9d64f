//! Computational tools for prime races: residue and character tables, a
//! segmented prime sieve, per-class counting functions with race statistics,
//! weighted prime sums, L-function zero ingestion and limiting bias densities.

pub mod arith;
pub mod density;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod race;
pub mod residue;
pub mod sieve;
pub mod summation;
pub mod zeros;

pub use error::{Error, Result};
