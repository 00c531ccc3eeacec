//! Real-valued special-function kernels.
//!
//! Everything here is a pure function of its arguments: the Gauss
//! hypergeometric function (power series plus an Euler-integral continuation),
//! the lower incomplete gamma function, the exponential integral and the
//! principal branch of the Lambert W function. The higher modules build the
//! utility family, the markup solver and the estimator on top of these.

mod expint;
mod hypergeometric;
mod incgamma;
mod lambert;
mod quadrature;

pub use expint::exp_integral_ei;
pub use hypergeometric::{hyp2f1, hyp2f1_euler_integral};
pub use incgamma::lower_incomplete_gamma;
pub use lambert::lambert_w0;
pub use quadrature::{beta_weighted_integral, integrate};

use crate::error::{Error, Result};

/// Truncation and quadrature settings shared by the series and integral
/// evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Stop summing once a term is at most `rel_tol` times the partial sum.
    pub rel_tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Absolute tolerance of the adaptive quadrature.
    pub quad_abs_tol: f64,
    /// Maximum bisection depth of any quadrature subinterval.
    pub quad_max_depth: u32,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-14, max_terms: 100_000, quad_abs_tol: 1e-12, quad_max_depth: 40 }
    }
}

impl SeriesConfig {
    /// Checks the invariants `rel_tol > 0`, `max_terms ≥ 1` and
    /// `quad_abs_tol > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 || !(self.quad_abs_tol > 0.0) {
            return Err(Error::Config(format!("invalid series configuration {self:?}")));
        }
        Ok(())
    }
}
