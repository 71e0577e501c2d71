use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Why a modulus is excluded from the ideal correspondence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub modulus: u64,
    pub admissible: bool,
    /// Primes dividing both the modulus and η·D_f.
    pub offending_primes: Vec<u64>,
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.admissible {
            write!(f, "n = {} is admissible", self.modulus)
        } else {
            let primes: Vec<String> = self.offending_primes.iter().map(|p| p.to_string()).collect();
            write!(
                f,
                "n = {} shares the prime(s) {} with eta * disc(f)",
                self.modulus,
                primes.join(", ")
            )
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("inadmissible modulus: {0}")]
    Inadmissible(AdmissibilityReport),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
