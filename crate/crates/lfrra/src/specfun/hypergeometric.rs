//! Gauss hypergeometric function ₂F₁: the defining power series and the
//! Euler integral used as its analytic continuation to `z < −1`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

use super::quadrature::beta_weighted_integral;
use super::SeriesConfig;

/// Sums the Gauss series `Σ (a)ₙ(b)ₙ/(c)ₙ · zⁿ/n!`.
///
/// Summation stops once a term is at most `cfg.rel_tol` times the partial
/// sum, or as soon as a numerator Pochhammer factor vanishes (terminating
/// series). The series is accepted for `|z| ≥ 1` only when it terminates.
///
/// # Errors
///
/// * [`Error::Domain`] if `c` hits a non-positive integer before the series
///   terminates, if `|z| ≥ 1` for a non-terminating series, or if an
///   argument is not finite.
/// * [`Error::Convergence`] if `cfg.max_terms` terms do not reach tolerance.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain("hyp2f1 arguments must be finite"));
    }
    let terminates = is_non_positive_integer(a) || is_non_positive_integer(b);
    if z.abs() >= 1.0 && !terminates {
        return Err(Error::domain(format!("hyp2f1 series diverges at |z| = {} ≥ 1", z.abs())));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let num = (a + nf) * (b + nf);
        if num == 0.0 {
            return Ok(sum);
        }
        let den = c + nf;
        if den == 0.0 {
            return Err(Error::domain(format!("hyp2f1 lower parameter c = {c} is a non-positive integer")));
        }
        term *= num / (den * (nf + 1.0)) * z;
        sum += term;
        if term.abs() <= cfg.rel_tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("hyp2f1({a}, {b}; {c}; {z}) did not converge within {} terms", cfg.max_terms)))
}

/// Evaluates `₂F₁(a, b; c; z)` through Euler's integral
/// `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−zt)^{−a} dt`.
///
/// Valid for `c > b > 0` and any real `z < 1`, which makes it the real-axis
/// continuation of the series beyond `z = −1`. The normalising Beta factor is
/// computed with the same quadrature as the integral, so that `z = 0` returns
/// exactly one and discretisation error largely cancels.
///
/// # Errors
///
/// * [`Error::Domain`] unless `c > b > 0` and `z < 1`.
/// * [`Error::Quadrature`] if the adaptive rule exceeds its depth cap.
pub fn hyp2f1_euler_integral(a: f64, b: f64, c: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain("hyp2f1 arguments must be finite"));
    }
    if !(b > 0.0 && c > b) {
        return Err(Error::domain(format!("Euler integral requires c > b > 0 (b={b}, c={c})")));
    }
    if !(z < 1.0) {
        return Err(Error::domain(format!("Euler integral requires z < 1 (z={z})")));
    }
    let d = c - b;
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    let kernel = |t: f64, _omt: f64| (-a * (-z * t).ln_1p()).exp();
    let integral = beta_weighted_integral(b, d, kernel, cfg)?;
    let norm = beta_weighted_integral(b, d, |_, _| 1.0, cfg)?;
    // Guard the normalisation against gross quadrature failure by comparing
    // with the Gamma-function value of B(b, c−b).
    let beta = (ln_gamma(b) + ln_gamma(d) - ln_gamma(c)).exp();
    if ((norm - beta) / beta).abs() > 1e-6 {
        return Err(Error::Quadrature(format!("Beta normalisation B({b}, {d}) inaccurate: {norm} vs {beta}")));
    }
    Ok(integral / norm)
}

fn is_non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}
