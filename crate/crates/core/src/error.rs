use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Budget exhaustion is kept apart from invalid input so callers (and the
/// command-line front end) can react differently to the two.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("resource budget exhausted in {what}: {detail}")]
    Resource { what: &'static str, detail: String },

    #[error("modulus {modulus} shares a factor with a denominator")]
    MisScopedModulus { modulus: String },

    #[error("value outside the declared S-integers: prime {prime} in a denominator")]
    NotSInteger { prime: String },

    #[error("polynomials are not coprime; common factor {common}")]
    NotCoprime { common: String },

    #[error("no residue avoids the polynomials modulo {prime}")]
    ResidueSearch { prime: u64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn resource(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Resource {
            what,
            detail: detail.into(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
