use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and summaries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: usize },

    #[error("truncated region ({lo}, {hi}) carries no numerically representable mass")]
    DegenerateMass { lo: f64, hi: f64 },

    #[error("posterior precision matrix is not positive definite")]
    Factorization,

    #[error("invalid sampler state: {0}")]
    InvalidState(String),

    #[error("need at least {needed} kept draws, got {got}")]
    InsufficientDraws { needed: usize, got: usize },

    #[error("truth vector does not have the q-ones-then-zeros layout: {0}")]
    Structure(String),

    #[error("column {0} of the design is constant before normalization")]
    DegenerateColumn(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("sampler aborted after {failures} factorization failures in {iterations} iterations")]
    Aborted { failures: usize, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
