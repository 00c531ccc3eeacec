//! Exponential integral `Ei(x)` on the real line.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Beyond this `|x|` the negative axis is evaluated through the continued
/// fraction of `E₁`; below it the power series is well conditioned.
const CF_SWITCH: f64 = 1.0;

const MAX_ITER: usize = 10_000;

/// Exponential integral `Ei(x) = −∫_{−x}^∞ e^{−s}/s ds` (Cauchy principal
/// value for `x > 0`).
///
/// * `x < 0` with `|x| ≤ 1`: the series `γ + ln|x| + Σ xⁿ/(n·n!)`.
/// * `x < −1`: `Ei(x) = −E₁(−x)` with the Lentz continued fraction of `E₁`.
/// * `x > 0`: the same power series (all terms positive, no cancellation)
///   up to `x = 40`, and the asymptotic expansion beyond.
///
/// # Errors
///
/// [`Error::Domain`] at `x = 0` (logarithmic singularity) or for NaN.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::domain("Ei is singular at x = 0"));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x < 0.0 && -x > CF_SWITCH {
        return e1_continued_fraction(-x).map(|v| -v);
    }
    if x > 40.0 {
        return Ok(ei_asymptotic(x));
    }
    ei_series(x)
}

fn ei_series(x: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..MAX_ITER {
        let nf = n as f64;
        term *= x / nf;
        let contrib = term / nf;
        sum += contrib;
        if contrib.abs() <= f64::EPSILON * sum.abs() {
            return Ok(EULER_GAMMA + x.abs().ln() + sum);
        }
    }
    Err(Error::Convergence(format!("Ei series did not converge at x = {x}")))
}

/// `E₁(y)` for `y > 1` via the modified Lentz algorithm.
fn e1_continued_fraction(y: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            return Ok(h * (-y).exp());
        }
    }
    Err(Error::Convergence(format!("E1 continued fraction did not converge at {y}")))
}

/// Asymptotic series `Ei(x) ~ eˣ/x Σ n!/xⁿ`, truncated at the smallest term.
fn ei_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 1..100 {
        let next = term * n as f64 / x;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= f64::EPSILON * sum {
            break;
        }
    }
    x.exp() / x * sum
}
