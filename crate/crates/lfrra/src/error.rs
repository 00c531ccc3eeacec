//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical kernels, the equilibrium solver and the
/// estimator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its budget before reaching tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Adaptive quadrature could not meet its tolerance within the depth cap.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// The parameter combination violates an admissibility condition.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    /// A utility variant was requested whose parameter constraints fail.
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    /// An inverse problem (demand, markup) has no solution for the input.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A root was not bracketed although the theory guarantees a bracket.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// Filtering removed every observation.
    #[error("no observations left after filtering: {0}")]
    Empty(String),

    /// No parameter value satisfies the estimation constraints.
    #[error("infeasible estimation problem: {0}")]
    Infeasible(String),

    /// The outer grid search did not converge within its iteration cap.
    #[error("estimation did not converge: {0}")]
    NonConvergence(String),

    /// Classification requires bootstrap confidence intervals.
    #[error("missing confidence intervals: {0}")]
    MissingCi(String),

    /// A configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
