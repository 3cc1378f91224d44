//! Algebraic and quasi-algebraic norm forms.
//!
//! The crate builds decomposable forms from number-field data, enumerates
//! their values on integer boxes, follows the orbit of the standard lattice
//! under the stabilizer torus, classifies unit-span algebras and constructs
//! bounded forms whose orbits are not compact.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod counterexamples;
pub mod error;
pub mod forms;
pub mod numberfield;
pub mod orbits;
pub mod pipeline;
pub mod spectrum;

pub use error::{Error, Result};
