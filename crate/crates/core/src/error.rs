use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates one of the construction inequalities.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series failed to meet its tolerance within the term budget.
    #[error("{what} did not converge within {terms} terms")]
    Convergence { what: &'static str, terms: usize },
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },
    /// A simulated replicate switched more often than allowed.
    #[error("replicate exceeded {0} regime switches")]
    MaxSwitches(u64),
    /// The closed form only exists for the fully symmetric process.
    #[error("requires symmetric parameters: {0}")]
    NotSymmetric(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
