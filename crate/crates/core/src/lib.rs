//! Exact, desk-scale experiments with the affine sieve on orbits of finitely
//! generated matrix groups over the rationals.

pub mod arith;
pub mod error;
pub mod heuristics;
pub mod linalg;
pub mod matgroup;
pub mod modp;
pub mod orbit_sieve;
pub mod poly;
pub mod unipotent;

pub use error::{Error, Result};
