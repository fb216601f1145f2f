//! Degenerate rational maps of the Riemann sphere.
//!
//! A point of the compactified space of degree-`d` maps is a pair `(P, Q)` of
//! homogeneous polynomials, possibly with common roots ("holes"). This crate
//! splits such a pair as `H·φ`, iterates it, builds its atomic limit measure,
//! samples maximal-entropy measures of nearby rational maps and evaluates
//! escape-rate potentials.

pub mod cli;
pub mod error;
pub mod families;
pub mod escape;
pub mod hpoly;
pub mod measure;
pub mod projline;
pub mod ratmap;
pub mod tolerance;

pub use error::{Error, Result};
