//! Minimal spacelike surfaces in Minkowski 4-space from holomorphic Weierstrass data.

pub mod complex_fn;
pub mod conjugate;
pub mod error;
pub mod fd;
pub mod fixtures;
pub mod graphs;
pub mod lattice;
pub mod metric;
pub mod minkowski;
pub mod report;
pub mod theta;
pub mod weierstrass;

pub use error::{Error, Result};
