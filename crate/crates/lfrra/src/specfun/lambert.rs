//! Principal branch `W₀` of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;

/// Principal branch of the Lambert W function: the `w ≥ −1` with
/// `w·eʷ = x`, for `x ≥ −1/e`.
///
/// The initial guess is a branch-point series near `−1/e`, `ln(1 + x)` for
/// moderate `x` and `L₁ − L₂ + L₂/L₁` (with `L₁ = ln x`, `L₂ = ln ln x`) for
/// `x ≥ e`; Halley iteration then converges in a handful of steps.
///
/// # Errors
///
/// [`Error::Domain`] for `x < −1/e` or NaN.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E {
        // Allow the branch point up to rounding in the caller's `−1/e`.
        if x.is_nan() || x < -INV_E * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::domain(format!("Lambert W₀ requires x ≥ −1/e (x={x})")));
        }
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let p2 = 2.0 * (E * x + 1.0);
    let mut w = if p2 < 0.25 {
        let p = p2.max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < E {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    if p2 == 0.0 {
        return Ok(-1.0);
    }
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega_constant() {
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn branch_point() {
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        assert!(lambert_w0(-0.4).is_err());
    }

    #[test]
    fn residual_over_wide_range() {
        for &x in &[-0.367, -0.3, -0.1, 1e-10, 0.5, 3.0, 100.0, 1e10, 1e300] {
            let w = lambert_w0(x).unwrap();
            let r = (w * w.exp() - x).abs();
            assert!(r <= 1e-13 * x.abs().max(1.0), "x={x} w={w} r={r}");
        }
    }
}
