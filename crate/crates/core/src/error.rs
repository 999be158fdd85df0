use thiserror::Error;

/// Errors raised by the numerical kernels and the coherent-state models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimated error {error:.3e} exceeds tolerance {tolerance:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("integrand envelope does not decay below {threshold:.3e} within {range:.1e} of the lower limit")]
    SlowDecay { threshold: f64, range: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("commutator [A, A+] = {delta} but must equal 1 (|delta - 1| <= 1e-10){hint}")]
    DeltaNotUnit { delta: f64, hint: &'static str },

    #[error("classically forbidden: E - V(q) = {gap:.3e} at q = {q}")]
    ClassicallyForbidden { q: f64, gap: f64 },

    #[error("outside the pseudo-action domain: {0}")]
    DomainError(String),

    #[error("shifted energy {shifted} lies outside the spectrum [0, {upper})")]
    OutOfSpectralRange { shifted: f64, upper: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
