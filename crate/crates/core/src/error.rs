use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A point that must lie strictly inside the domain does not.
    #[error("point is not strictly inside the domain (rho = {rho:e})")]
    OutsideDomain { rho: f64 },

    /// The kernel series failed to certify its truncation error.
    #[error(
        "kernel series did not converge after {terms} terms (|u| = {u_abs}, last ratio = {ratio})"
    )]
    NonConvergence {
        terms: usize,
        u_abs: f64,
        ratio: f64,
    },

    #[error("unsupported quadrature configuration: {0}")]
    Unsupported(String),

    /// A sampled integrand value was not finite.
    #[error("integrand evaluation failed at sample {index}: {reason}")]
    Evaluation { index: usize, reason: String },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
