//! Optimal mixed-level supersaturated designs from Kronecker sums of
//! equidistant designs and difference matrices.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod constructors;
pub mod criteria;
pub mod error;
pub mod generators;
pub mod matrix;
pub mod verify;

pub use error::{Error, Result};
