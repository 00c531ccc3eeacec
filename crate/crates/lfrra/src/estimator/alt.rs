//! Alternative specifications: the translated CREMR form with `β = 1` and
//! `α = −1/(γσ)`, and the Klenow–Willis power-law RRA.

use serde::{Deserialize, Serialize};

use super::data::PreparedData;
use super::fit::{multistart_min, soc_verify_fitted, Sample};
use super::{derived_statistics, EstimationConfig, EstimationResult, Specification};
use crate::error::{Error, Result};

/// Shrinkage keeping clipped values strictly inside open bounds.
const NUDGE: f64 = 1e-12;

/// Underlying parameters of a translated CREMR fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnpFit {
    /// Translation `γ ∈ (0, q_min)`.
    pub gamma: f64,
    /// Elasticity parameter `σ ≥ 1`.
    pub sigma: f64,
}

/// RRA of the translated CREMR form, `(q − γσ)/(σ(q − γ))`, written with
/// `λ = 1/σ` as `λ·q/(q−γ) − γ/(q−γ)`.
fn mnp_rss(sample: &Sample, gamma: f64, lambda: f64) -> f64 {
    let mut total = 0.0;
    for (&q, &y) in sample.q.iter().zip(&sample.y) {
        let r = (lambda * q - gamma) / (q - gamma);
        if !(r > 0.0 && r <= 1.0) {
            return f64::INFINITY;
        }
        total += (y - r) * (y - r);
    }
    total
}

/// Least-squares `λ = 1/σ` at fixed `γ`, clipped to `(γ/q_min, 1]` where
/// the fitted RRA lies in `(0, 1]` at every observation.
fn mnp_lambda(sample: &Sample, gamma: f64) -> Option<f64> {
    let (mut shh, mut shy) = (0.0, 0.0);
    for (&q, &y) in sample.q.iter().zip(&sample.y) {
        let h = q / (q - gamma);
        let g = gamma / (q - gamma);
        shh += h * h;
        shy += h * (y + g);
    }
    let lower = gamma / sample.q_min * (1.0 + NUDGE);
    let upper = 1.0;
    (lower < upper).then(|| (shy / shh).clamp(lower, upper))
}

/// Grid of the logit of `γ/q_min`.
const LOGIT_RANGE: (f64, f64) = (-25.0, 25.0);
const LOGIT_POINTS: usize = 51;

/// Fits the translated CREMR specification over `(γ, σ)` with
/// `0 < γ < q_min` and `σ ≥ 1`, reporting `α = −1/(γσ)` and `β = 1`.
///
/// `σ` enters linearly through `1/σ` and is profiled out in closed form;
/// `γ` is searched on the logit of `γ/q_min`.
///
/// # Errors
///
/// [`Error::Infeasible`] when `q_min ≤ 0` or no pair satisfies the
/// constraints; [`Error::Empty`] for fewer than three observations.
pub fn fit_mnp(data: &PreparedData, cfg: &EstimationConfig) -> Result<EstimationResult> {
    cfg.validate()?;
    if data.len() < 3 {
        return Err(Error::Empty(format!("estimation needs at least 3 observations (have {})", data.len())));
    }
    if !(data.q_min > 0.0) {
        return Err(Error::Infeasible("the translated CREMR form needs q_min > 0".into()));
    }
    let sample = Sample::new(data);
    let gamma_at = |t: f64| sample.q_min / (1.0 + (-t).exp());
    let objective = |t: f64| {
        let gamma = gamma_at(t);
        mnp_lambda(&sample, gamma).map_or(f64::INFINITY, |l| mnp_rss(&sample, gamma, l))
    };
    let m = multistart_min(objective, LOGIT_RANGE.0, LOGIT_RANGE.1, LOGIT_POINTS, 3);
    if !m.fx.is_finite() {
        return Err(Error::Infeasible("no (γ, σ) satisfies the translated CREMR constraints".into()));
    }
    let gamma = gamma_at(m.x);
    let lambda = mnp_lambda(&sample, gamma).expect("feasible at the optimum");
    let sigma = 1.0 / lambda;
    let alpha = -1.0 / (gamma * sigma);
    let (bmis, am) = derived_statistics(alpha, 1.0, sigma);
    let mut result = EstimationResult {
        spec: Specification::Mnp,
        alpha_hat: alpha,
        beta_hat: 1.0,
        sigma_hat: sigma,
        rss: m.fx,
        n_obs: data.len(),
        beta_minus_inv_sigma: bmis,
        alpha_times_1_minus_beta_sigma: am,
        rra_type: None,
        ci: None,
        skipped_replicates: None,
        soc_all_ok: false,
        sigma_identified: true,
        quantity_scale: data.quantity_scale,
        outer_iterations: 0,
        implicit_additivity: false,
        mnp: Some(MnpFit { gamma, sigma }),
    };
    result.soc_all_ok = soc_verify_fitted(&result, &data.observations);
    Ok(result)
}

/// A fit of RRA `q^{ε/σ̄}/σ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KwResult {
    /// Fitted `ε`.
    pub epsilon: f64,
    /// Fitted `σ̄`.
    pub sigma_bar: f64,
    /// Residual sum of squares.
    pub rss: f64,
    /// Number of observations used.
    pub n_obs: usize,
}

/// Grid of the exponent `θ = ε/σ̄`.
const THETA_RANGE: (f64, f64) = (-2.0, 2.0);
const THETA_POINTS: usize = 41;

/// Fits RRA `q^{ε/σ̄}/σ̄` subject to `0 < RRA ≤ 1` at every observation.
///
/// With `θ = ε/σ̄` and `λ = 1/σ̄` the fitted RRA is `λ·q^θ`, linear in `λ`,
/// which is profiled out in closed form; `θ` is searched on `[−2, 2]`.
///
/// # Errors
///
/// [`Error::Empty`] for fewer than three observations and
/// [`Error::Infeasible`] if nothing satisfies the constraints.
pub fn fit_klenow_willis(data: &PreparedData, cfg: &EstimationConfig) -> Result<KwResult> {
    cfg.validate()?;
    if data.len() < 3 {
        return Err(Error::Empty(format!("estimation needs at least 3 observations (have {})", data.len())));
    }
    let sample = Sample::new(data);
    let profile = |theta: f64| -> (f64, f64) {
        let (mut sgg, mut sgy, mut gmax) = (0.0, 0.0, 0.0f64);
        for (&q, &y) in sample.q.iter().zip(&sample.y) {
            let g = q.powf(theta);
            sgg += g * g;
            sgy += g * y;
            gmax = gmax.max(g);
        }
        let lambda = (sgy / sgg).clamp(f64::MIN_POSITIVE, 1.0 / gmax);
        let mut total = 0.0;
        for (&q, &y) in sample.q.iter().zip(&sample.y) {
            let r = lambda * q.powf(theta);
            if !(r > 0.0 && r <= 1.0) {
                return (lambda, f64::INFINITY);
            }
            total += (y - r) * (y - r);
        }
        (lambda, total)
    };
    let m = multistart_min(|t| profile(t).1, THETA_RANGE.0, THETA_RANGE.1, THETA_POINTS, 3);
    if !m.fx.is_finite() {
        return Err(Error::Infeasible("no (ε, σ̄) keeps the fitted RRA in (0, 1]".into()));
    }
    let (lambda, rss) = profile(m.x);
    let sigma_bar = 1.0 / lambda;
    Ok(KwResult { epsilon: m.x * sigma_bar, sigma_bar, rss, n_obs: data.len() })
}
