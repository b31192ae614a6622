use thiserror::Error;

/// Errors raised by the analysis, harness and reduction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HusError {
    #[error("matrix is singular (det = {det:e})")]
    Singular { det: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("operation requires real distinct eigenvalues")]
    DegenerateClass,

    #[error("constant formula does not apply: {0}")]
    CaseMismatch(&'static str),

    #[error("system is not Hyers-Ulam stable")]
    NotStable,

    #[error("system is Hyers-Ulam stable; no instability witness exists")]
    IsStable,

    #[error("horizon too large: |Re(lambda)| * t = {growth:.3} exceeds {limit}")]
    HorizonTooLarge { growth: f64, limit: f64 },

    #[error("sinusoidal forcing at omega = {omega} resonates with the spectrum")]
    Resonant { omega: f64 },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("triangular substitution requires real roots")]
    IncompatibleSubstitution,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, HusError>;
