//! The constrained least-squares fit: the residual sum of squares, the
//! profiled inner search over `(β, σ)` at fixed `α`, and the outer
//! bracketing grid over `α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alt::fit_mnp;
use super::data::{FirmObservation, PreparedData};
use super::{derived_statistics, EstimationConfig, EstimationResult, Specification};
use crate::error::{Error, Result};
use crate::markup::soc_check;
use crate::solve::{brent_min, Minimum};
use crate::utility::LfrraParams;

/// Shrinkage keeping clipped values strictly inside open bounds.
const NUDGE: f64 = 1e-12;

/// Points of the dense grid used by the second-order-condition check.
const SOC_GRID: usize = 1000;

/// Residual sum of squares `Σ[1 − μ(ω) − (αq+β)/(ασq+1)]²`.
///
/// Returns `+∞` when `αq+β > 0`, `ασq+1 > 0` or `0 < RRA ≤ 1` fails at any
/// observation.
pub fn rss(params: &LfrraParams, observations: &[FirmObservation]) -> f64 {
    let mut total = 0.0;
    for o in observations {
        match checked_rra(params.alpha, params.beta, params.sigma, o.quantity) {
            Some(r) => total += (o.one_minus_mu() - r).powi(2),
            None => return f64::INFINITY,
        }
    }
    total
}

/// The fitted RRA at `q`, or `None` when a constraint fails.
#[inline]
fn checked_rra(alpha: f64, beta: f64, sigma: f64, q: f64) -> Option<f64> {
    let num = alpha * q + beta;
    let den = alpha * sigma * q + 1.0;
    if !(num > 0.0 && den > 0.0) {
        return None;
    }
    let r = num / den;
    (r > 0.0 && r <= 1.0).then_some(r)
}

/// Quantities and targets in flat arrays for the inner loops.
pub(crate) struct Sample {
    pub(crate) q: Vec<f64>,
    pub(crate) y: Vec<f64>,
    pub(crate) q_min: f64,
    pub(crate) q_max: f64,
}

impl Sample {
    pub(crate) fn new(data: &PreparedData) -> Self {
        let (q, y) = data.columns();
        Self { q, y, q_min: data.q_min, q_max: data.q_max }
    }

    fn rss(&self, alpha: f64, beta: f64, sigma: f64) -> f64 {
        let mut total = 0.0;
        for (&q, &y) in self.q.iter().zip(&self.y) {
            match checked_rra(alpha, beta, sigma, q) {
                Some(r) => total += (y - r) * (y - r),
                None => return f64::INFINITY,
            }
        }
        total
    }
}

/// Best `(β, σ)` for a fixed `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerFit {
    /// Profiled `β`.
    pub beta: f64,
    /// Profiled `σ` (0 when unidentified).
    pub sigma: f64,
    /// Residual sum of squares (`+∞` when infeasible).
    pub rss: f64,
    /// False when `σ` does not enter the objective (`α = 0`).
    pub sigma_identified: bool,
}

impl InnerFit {
    const INFEASIBLE: InnerFit =
        InnerFit { beta: f64::NAN, sigma: f64::NAN, rss: f64::INFINITY, sigma_identified: true };
}

/// How `β` enters the inner problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum BetaMode {
    /// Profiled in closed form.
    Free,
    /// Pinned.
    Fixed(f64),
}

/// Minimises a univariate function over `[lo, hi]`: evaluates an even grid
/// of `points`, then polishes up to `refine` of the lowest local minima with
/// Brent's method on their neighbouring cells. Ties keep the earliest point,
/// so the outcome is deterministic.
pub(crate) fn multistart_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, refine: usize) -> Minimum {
    let step = (hi - lo) / (points - 1) as f64;
    let ts: Vec<f64> = (0..points).map(|k| lo + step * k as f64).collect();
    let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let mut minima: Vec<usize> = (0..points)
        .filter(|&k| fs[k].is_finite() && (k == 0 || fs[k] <= fs[k - 1]) && (k + 1 == points || fs[k] <= fs[k + 1]))
        .collect();
    minima.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]).then(a.cmp(&b)));
    minima.dedup();
    let mut best = Minimum { x: f64::NAN, fx: f64::INFINITY };
    for &k in minima.iter().take(refine) {
        if fs[k] < best.fx {
            best = Minimum { x: ts[k], fx: fs[k] };
        }
        let a = ts[k.saturating_sub(1)];
        let b = ts[(k + 1).min(points - 1)];
        let m = brent_min(&f, a, b, 1e-12, 200);
        if m.fx < best.fx {
            best = m;
        }
    }
    best
}

/// The σ-coordinate `σ = anchor + direction·eᵗ` mapping the real line onto
/// the σ values for which some admissible `β ≥ beta_floor` exists.
fn sigma_chart(alpha: f64, beta_floor: f64, q_max: f64) -> (f64, f64) {
    if alpha > 0.0 {
        (1.0 - (1.0 - beta_floor) / (alpha * q_max), 1.0)
    } else {
        (1.0 + (1.0 - beta_floor) / (-alpha * q_max), -1.0)
    }
}

/// Grid of the log-offset `t` in the σ chart.
const T_RANGE: (f64, f64) = (-16.0, 10.0);
const T_POINTS: usize = 27;
const T_REFINE: usize = 3;

/// Inner problem at fixed `α` on a flat sample.
pub(crate) fn inner(sample: &Sample, alpha: f64, mode: BetaMode) -> InnerFit {
    let n = sample.q.len() as f64;
    if alpha == 0.0 {
        let beta = match mode {
            BetaMode::Free => (sample.y.iter().sum::<f64>() / n).clamp(NUDGE, 1.0),
            BetaMode::Fixed(b) => b,
        };
        let rss = sample.rss(0.0, beta, 0.0);
        return InnerFit { beta, sigma: 0.0, rss, sigma_identified: false };
    }
    let open_floor = (-alpha * sample.q_max).max(0.0);
    if !(open_floor < 1.0) {
        return InnerFit::INFEASIBLE;
    }
    if let BetaMode::Fixed(b) = mode {
        if alpha < 0.0 && b <= open_floor {
            return InnerFit::INFEASIBLE;
        }
    }
    let chart_floor = match mode {
        BetaMode::Free => open_floor,
        BetaMode::Fixed(b) => b,
    };
    let (anchor, direction) = sigma_chart(alpha, chart_floor, sample.q_max);
    let sigma_at = |t: f64| anchor + direction * t.exp();
    let beta_at = |sigma: f64| -> Option<f64> {
        match mode {
            BetaMode::Fixed(b) => Some(b),
            BetaMode::Free => profile_beta(sample, alpha, sigma),
        }
    };
    let objective = |t: f64| {
        let sigma = sigma_at(t);
        match beta_at(sigma) {
            Some(beta) => sample.rss(alpha, beta, sigma),
            None => f64::INFINITY,
        }
    };
    let m = multistart_min(objective, T_RANGE.0, T_RANGE.1, T_POINTS, T_REFINE);
    if !m.fx.is_finite() {
        return InnerFit::INFEASIBLE;
    }
    let sigma = sigma_at(m.x);
    let beta = beta_at(sigma).unwrap_or(f64::NAN);
    InnerFit { beta, sigma, rss: m.fx, sigma_identified: true }
}

/// Least-squares `β` for fixed `(α, σ)`, clipped to the interval where all
/// constraints hold. The fitted RRA is `αq·w + β·w` with `w = 1/(ασq+1)`,
/// linear in `β`.
fn profile_beta(sample: &Sample, alpha: f64, sigma: f64) -> Option<f64> {
    let (mut sww, mut swr) = (0.0, 0.0);
    for (&q, &y) in sample.q.iter().zip(&sample.y) {
        let den = alpha * sigma * q + 1.0;
        if !(den > 0.0) {
            return None;
        }
        let w = 1.0 / den;
        sww += w * w;
        swr += w * (y - alpha * q * w);
    }
    let lower = if alpha > 0.0 { 0.0 } else { -alpha * sample.q_max + NUDGE };
    let slope = alpha * (sigma - 1.0);
    let q_ext = if slope < 0.0 { sample.q_max } else { sample.q_min };
    let upper = (1.0 + slope * q_ext).min(1.0) - 4.0 * f64::EPSILON;
    if upper < lower {
        return None;
    }
    Some((swr / sww).clamp(lower, upper))
}

/// Minimises the residual sum of squares over `(β ∈ [0,1], σ)` at fixed
/// `α ≥ −1/q_max`.
///
/// `β` is profiled out in closed form (the fitted RRA is linear in `β`) and
/// `σ` is searched on a log-offset chart of its feasible half-line with a
/// fixed multi-start schedule. At `α = 0` the optimum is the clipped mean of
/// `1 − μ` and `σ` is reported as unidentified.
///
/// # Errors
///
/// [`Error::Infeasible`] when no `(β, σ)` satisfies the constraints.
pub fn fit_inner(alpha: f64, data: &PreparedData) -> Result<InnerFit> {
    let sample = Sample::new(data);
    if alpha < -1.0 / sample.q_max {
        return Err(Error::Infeasible(format!("α = {alpha} lies below −1/q_max")));
    }
    let fit = inner(&sample, alpha, BetaMode::Free);
    if fit.rss.is_finite() {
        Ok(fit)
    } else {
        Err(Error::Infeasible(format!("no (β, σ) satisfies the constraints at α = {alpha}")))
    }
}

/// One run of the outer grid search.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OuterRun {
    pub(crate) alpha: f64,
    pub(crate) inner: InnerFit,
    pub(crate) iterations: usize,
}

/// Outer grid search over `α` starting from `[floor, upper_start]`.
///
/// Each iteration evaluates `steps` equally spaced values. An interior
/// argmin `i` re-brackets to `[α_{i−1}, α_{i+1}]`; an argmin at the top
/// end keeps `α_{N−2}` and moves the top up by `(ξ−1)·max(|ᾱ|, width)`; an
/// argmin at the bottom end above the floor `−1/q_max` moves the bottom down
/// likewise (never below the floor). Convergence is declared after a
/// re-bracketing step once `|α̂_t − α̂_{t−1}| < tol·max(1, |α̂_t|)`. The best
/// point seen across iterations is returned.
pub(crate) fn outer_search<F>(
    q_max: f64,
    cfg: &EstimationConfig,
    steps: usize,
    upper_start: f64,
    evaluate: F,
) -> Result<OuterRun>
where
    F: Fn(f64) -> InnerFit + Sync,
{
    let floor = -1.0 / q_max;
    let (mut lo, mut hi) = (floor, upper_start);
    let mut previous: Option<f64> = None;
    let mut best: Option<OuterRun> = None;
    for iteration in 1..=cfg.max_iterations {
        let width = hi - lo;
        let alphas: Vec<f64> =
            (0..steps).map(|j| if j + 1 == steps { hi } else { lo + width * j as f64 / (steps - 1) as f64 }).collect();
        let fits: Vec<InnerFit> = alphas.par_iter().map(|&a| evaluate(a)).collect();
        let mut i = 0;
        for j in 1..steps {
            if fits[j].rss < fits[i].rss {
                i = j;
            }
        }
        if !fits[i].rss.is_finite() {
            return Err(Error::Infeasible(format!("no feasible α on [{lo}, {hi}]")));
        }
        let alpha_hat = alphas[i];
        if best.is_none_or(|b| fits[i].rss < b.inner.rss) {
            best = Some(OuterRun { alpha: alpha_hat, inner: fits[i], iterations: iteration });
        }
        let scale = cfg.convergence_tol * alpha_hat.abs().max(1.0);
        if i + 1 == steps {
            lo = alphas[steps - 2];
            hi += (cfg.expansion_factor - 1.0) * hi.abs().max(width);
        } else if i == 0 && lo > floor {
            hi = alphas[1];
            lo = (lo - (cfg.expansion_factor - 1.0) * lo.abs().max(width)).max(floor);
        } else {
            let (new_lo, new_hi) = (alphas[i.saturating_sub(1)], alphas[i + 1]);
            let settled = previous.is_some_and(|p| (alpha_hat - p).abs() < scale);
            if settled || new_hi - new_lo < scale {
                let mut run = best.expect("best is set above");
                run.iterations = iteration;
                return Ok(run);
            }
            lo = new_lo;
            hi = new_hi;
        }
        previous = Some(alpha_hat);
    }
    Err(Error::NonConvergence(format!("outer grid search exceeded {} iterations", cfg.max_iterations)))
}

/// Runs the ascending and the descending start and keeps the smaller RSS.
fn both_runs<F>(data: &PreparedData, cfg: &EstimationConfig, steps: usize, evaluate: F) -> Result<OuterRun>
where
    F: Fn(f64) -> InnerFit + Sync,
{
    let up = outer_search(data.q_max, cfg, steps, cfg.ascend_upper, &evaluate);
    let down = outer_search(data.q_max, cfg, steps, cfg.descend_upper, &evaluate);
    match (up, down) {
        (Ok(a), Ok(d)) => Ok(if d.inner.rss < a.inner.rss { d } else { a }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(d)) => Ok(d),
        (Err(e), Err(_)) => Err(e),
    }
}

fn check_input(data: &PreparedData, cfg: &EstimationConfig) -> Result<()> {
    cfg.validate()?;
    if data.len() < 3 {
        return Err(Error::Empty(format!("estimation needs at least 3 observations (have {})", data.len())));
    }
    Ok(())
}

fn assemble(data: &PreparedData, spec: Specification, run: OuterRun) -> EstimationResult {
    let InnerFit { beta, sigma, rss: fitted_rss, sigma_identified } = run.inner;
    let (bmis, am) = derived_statistics(run.alpha, beta, sigma);
    let mut result = EstimationResult {
        spec,
        alpha_hat: run.alpha,
        beta_hat: beta,
        sigma_hat: sigma,
        rss: fitted_rss,
        n_obs: data.len(),
        beta_minus_inv_sigma: bmis,
        alpha_times_1_minus_beta_sigma: am,
        rra_type: None,
        ci: None,
        skipped_replicates: None,
        soc_all_ok: false,
        sigma_identified,
        quantity_scale: data.quantity_scale,
        outer_iterations: run.iterations,
        implicit_additivity: false,
        mnp: None,
    };
    result.soc_all_ok = soc_verify_fitted(&result, &data.observations);
    result
}

fn fit_with_steps(
    data: &PreparedData,
    cfg: &EstimationConfig,
    steps: usize,
    mode: BetaMode,
    spec: Specification,
) -> Result<EstimationResult> {
    check_input(data, cfg)?;
    let sample = Sample::new(data);
    let run = both_runs(data, cfg, steps, |a| inner(&sample, a, mode))?;
    Ok(assemble(data, spec, run))
}

/// Fits the unrestricted triple by the inner/outer procedure, running both
/// the ascending and the descending start and keeping the smaller RSS.
///
/// # Errors
///
/// [`Error::Config`] for invalid settings, [`Error::Empty`] for fewer than
/// three observations, [`Error::Infeasible`] and
/// [`Error::NonConvergence`] from the search.
pub fn fit_lfrra(data: &PreparedData, cfg: &EstimationConfig) -> Result<EstimationResult> {
    check_input(data, cfg)?;
    let sample = Sample::new(data);
    let steps = cfg.grid_steps;
    let mut run = both_runs(data, cfg, steps, |a| inner(&sample, a, BetaMode::Free))?;
    // The pinned-β optima are feasible for the unrestricted problem; keeping
    // the best of the three makes the nesting of the specifications exact.
    for b in [0.0, 1.0] {
        if let Ok(candidate) = both_runs(data, cfg, steps, |a| inner(&sample, a, BetaMode::Fixed(b))) {
            if candidate.inner.rss < run.inner.rss {
                run = candidate;
            }
        }
    }
    Ok(assemble(data, Specification::Lfrra, run))
}

/// Fits `(α, σ)` with `β` pinned (`0` gives the HARA family, `1` the CREMR
/// family).
///
/// # Errors
///
/// As [`fit_lfrra`], plus [`Error::Config`] for `β ∉ [0, 1]`.
pub fn fit_constrained_beta(data: &PreparedData, cfg: &EstimationConfig, beta_fixed: f64) -> Result<EstimationResult> {
    constrained(data, cfg, cfg.grid_steps, beta_fixed)
}

fn constrained(data: &PreparedData, cfg: &EstimationConfig, steps: usize, beta_fixed: f64) -> Result<EstimationResult> {
    if !(0.0..=1.0).contains(&beta_fixed) {
        return Err(Error::Config(format!("pinned β must lie in [0, 1] (got {beta_fixed})")));
    }
    let spec = if beta_fixed == 0.0 {
        Specification::Beta0
    } else if beta_fixed == 1.0 {
        Specification::Beta1
    } else {
        Specification::Lfrra
    };
    fit_with_steps(data, cfg, steps, BetaMode::Fixed(beta_fixed), spec)
}

/// Same objective and search as [`fit_lfrra`]; the fitted `α` is read as
/// `α̃ = α/U` in the scaled quantities `z = q/U` of implicit additivity.
/// `U` itself is not identified.
pub fn fit_implicit(data: &PreparedData, cfg: &EstimationConfig) -> Result<EstimationResult> {
    let mut result = fit_lfrra(data, cfg)?;
    result.spec = Specification::Implicit;
    result.implicit_additivity = true;
    Ok(result)
}

/// Fits a specification of the LFRRA family with a given number of grid
/// steps (the bootstrap uses fewer). The Klenow–Willis form is not part of
/// the family; use [`super::fit_klenow_willis`].
///
/// # Errors
///
/// [`Error::Config`] for [`Specification::Kw`], otherwise as the
/// individual fitters.
pub fn fit_specification(
    data: &PreparedData,
    cfg: &EstimationConfig,
    spec: Specification,
    steps: usize,
) -> Result<EstimationResult> {
    match spec {
        Specification::Lfrra => fit_with_steps(data, cfg, steps, BetaMode::Free, spec),
        Specification::Implicit => {
            let mut r = fit_with_steps(data, cfg, steps, BetaMode::Free, spec)?;
            r.implicit_additivity = true;
            Ok(r)
        }
        Specification::Beta0 => constrained(data, cfg, steps, 0.0),
        Specification::Beta1 => constrained(data, cfg, steps, 1.0),
        Specification::Mnp => fit_mnp(data, cfg),
        Specification::Kw => Err(Error::Config("the Klenow–Willis form has its own result type".into())),
    }
}

/// Checks the pricing second-order condition
/// `αq/(αq+β) + (1−αq−β)/(ασq+1) > 0` at every observed quantity and on a
/// dense grid up to the largest one.
///
/// For the translated CREMR fit both the numerator and the denominator of
/// the RRA are negative; the condition is then evaluated in its equivalent
/// form `r(1−r) + q·r′ > 0` on the quantities above `γ·max(1, σ)`.
pub fn soc_verify_fitted(result: &EstimationResult, observations: &[FirmObservation]) -> bool {
    let params = result.params();
    let q_max = observations.iter().map(|o| o.quantity).fold(0.0, f64::max);
    if let Some(mnp) = result.mnp {
        let lo = mnp.gamma * mnp.sigma.max(1.0);
        let ok = |q: f64| {
            let den = params.alpha * params.sigma * q + 1.0;
            let r = (params.alpha * q + params.beta) / den;
            let slope = params.alpha * params.one_minus_beta_sigma() / (den * den);
            r * (1.0 - r) + q * slope > 0.0
        };
        return observations.iter().all(|o| ok(o.quantity))
            && (1..=SOC_GRID).all(|k| ok(lo + (q_max - lo) * k as f64 / SOC_GRID as f64));
    }
    observations.iter().all(|o| soc_check(&params, o.quantity))
        && (0..=SOC_GRID).all(|k| soc_check(&params, q_max * k as f64 / SOC_GRID as f64))
}
