//! Exact per-bidegree computations for linear Koszul duality of dg-modules
//! over graded-symmetric algebras.

pub mod bigraded;
pub mod cli;
pub mod dgmod;
pub mod error;
pub mod geometry;
pub mod koszul;
pub mod linalg;
pub mod symdg;

pub use error::{Error, Result};
