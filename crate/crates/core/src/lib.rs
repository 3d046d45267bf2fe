//! Pencils of quadrics over finite fields: exact enumeration of the maximal
//! linear subspaces in the base locus, the finite stabilizer groups acting on
//! them, the divisor action through the involution tau, and the reduction
//! calculus for regular pencils.

pub mod cli;
pub mod error;
pub mod fano;
pub mod fixtures;
pub mod gf;
pub mod grouplaw;
pub mod linalg;
pub mod quadrics;
pub mod reduction;
pub mod stab;

pub use error::{Error, Result};
