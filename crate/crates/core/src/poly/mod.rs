//! Exact polynomial algebra.

pub mod certificate;
pub mod density;
pub mod mgcd;
mod multipoly;
pub mod nilpotent;
pub mod parse;
pub mod univariate;

pub use certificate::{bad_prime_bound, gcd_certificate, progression_avoiding, BadPrimeBound, GcdCertificate, Progression};
pub use density::{zariski_density_test, DensityVerdict};
pub use multipoly::{inv_mod, rat_mod, Monomial, MultiPoly};
pub use nilpotent::{malcev_lattice, nilpotent_exp, nilpotent_log, NilpotentLog};
pub use parse::{matrix_parser, PolyParser};
