use thiserror::Error;

/// Errors raised by the analysis layer.
///
/// `Inconsistent` is reserved for disagreements between two parts of the
/// toolkit (for example a nonexistence verdict whose witness cannot be
/// produced). Everything else is a validation failure of the caller's input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension N = {0} is below the Hardy regime (need N >= 3)")]
    Dimension(u32),

    #[error("mu = {mu} is below the Hardy threshold mu0 = {mu0}")]
    BelowThreshold { mu: f64, mu0: f64 },

    #[error("p_star needs mu in [mu0, 0), got mu = {0}")]
    NonNegativeMu(f64),

    #[error("exponents p, q must be positive and finite, got p = {p}, q = {q}")]
    Exponents { p: f64, q: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("radius must be positive, got r = {0}")]
    Radius(f64),

    #[error("negative base {base} raised to non-integer power {exponent}")]
    NegativeBase { base: f64, exponent: f64 },

    #[error("case hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistent(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
