//! Lower incomplete gamma function.

use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{Error, Result};

/// Lower incomplete gamma function `γ(a, x) = ∫₀ˣ t^{a−1} e^{−t} dt`.
///
/// Computed as `Γ(a)·P(a, x)` from the regularised function of `statrs`.
///
/// # Errors
///
/// [`Error::Domain`] if `a ≤ 0`, `x < 0` or an argument is not finite.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("lower incomplete gamma requires a > 0 (a={a})")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(Error::domain(format!("lower incomplete gamma requires x ≥ 0 (x={x})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(gamma(a));
    }
    Ok(gamma(a) * gamma_lr(a, x))
}
