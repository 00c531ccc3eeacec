//! Percentile bootstrap and RRA-shape classification.
//!
//! Replicate `b` draws its resample from a ChaCha8 generator seeded with the
//! configured seed and switched to stream `b`, so every replicate is
//! reproducible on its own and serial and parallel runs agree exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::PreparedData;
use super::fit::fit_specification;
use super::{
    derived_statistics, ConfidenceIntervals, EstimationConfig, EstimationResult, Interval95, RraType, Specification,
};
use crate::error::{Error, Result};

/// Fitted triple of one bootstrap replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Replicate {
    /// Replicate `α̃`.
    pub alpha: f64,
    /// Replicate `β̃`.
    pub beta: f64,
    /// Replicate `σ̃`.
    pub sigma: f64,
}

/// All replicate fits and the resulting intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// Successful replicates in replicate order.
    pub replicates: Vec<Replicate>,
    /// Replicates whose fit failed and were left out.
    pub skipped: usize,
    /// 2.5/97.5 percentile intervals.
    pub ci: ConfidenceIntervals,
}

/// Nearest-rank percentile of ascending-sorted values: the element of rank
/// `⌈p·m⌉` (1-based), clamped to the sample.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    let rank = (p * m as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(m) - 1]
}

fn interval(mut values: Vec<f64>) -> Interval95 {
    values.sort_by(f64::total_cmp);
    Interval95 { lower: percentile(&values, 0.025), upper: percentile(&values, 0.975) }
}

/// Resamples the prepared data `cfg.bootstrap_reps` times with replacement,
/// refits `spec` on each resample with `cfg.bootstrap_grid_steps` grid
/// points, and forms percentile intervals for `α`, `β`, `σ`, `β − 1/σ` and
/// `α(1 − βσ)`.
///
/// Replicates run on the current rayon pool. Failed replicate fits are
/// counted in [`BootstrapOutcome::skipped`].
///
/// # Errors
///
/// [`Error::Config`] for zero replicates or the Klenow–Willis form, and
/// [`Error::Infeasible`] when every replicate fails.
pub fn bootstrap(data: &PreparedData, cfg: &EstimationConfig, spec: Specification) -> Result<BootstrapOutcome> {
    cfg.validate()?;
    if cfg.bootstrap_reps == 0 {
        return Err(Error::Config("bootstrap needs at least one replicate".into()));
    }
    if spec == Specification::Kw {
        return Err(Error::Config("bootstrap is available for the LFRRA family only".into()));
    }
    let n = data.len();
    let fits: Vec<Option<Replicate>> = (0..cfg.bootstrap_reps)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let resample = (0..n).map(|_| data.observations[rng.random_range(0..n)].clone()).collect();
            let sample = PreparedData::from_scaled(resample, data.quantity_scale).ok()?;
            let fit = fit_specification(&sample, cfg, spec, cfg.bootstrap_grid_steps).ok()?;
            Some(Replicate { alpha: fit.alpha_hat, beta: fit.beta_hat, sigma: fit.sigma_hat })
        })
        .collect();
    let skipped = fits.iter().filter(|f| f.is_none()).count();
    let replicates: Vec<Replicate> = fits.into_iter().flatten().collect();
    if replicates.is_empty() {
        return Err(Error::Infeasible("every bootstrap replicate failed".into()));
    }
    let column = |f: &dyn Fn(&Replicate) -> f64| interval(replicates.iter().map(f).collect());
    let ci = ConfidenceIntervals {
        alpha: column(&|r| r.alpha),
        beta: column(&|r| r.beta),
        sigma: column(&|r| r.sigma),
        beta_minus_inv_sigma: column(&|r| derived_statistics(r.alpha, r.beta, r.sigma).0),
        alpha_times_1_minus_beta_sigma: column(&|r| derived_statistics(r.alpha, r.beta, r.sigma).1),
    };
    Ok(BootstrapOutcome { replicates, skipped, ci })
}

/// Classifies the RRA shape from bootstrap intervals.
///
/// CRRA when the interval for `α` or for `β − 1/σ` contains zero;
/// otherwise IRRA when the interval for `α(1 − βσ)` is entirely positive,
/// DRRA when entirely negative, and NA when it straddles zero.
pub fn classify_intervals(ci: &ConfidenceIntervals) -> RraType {
    if ci.alpha.contains(0.0) || ci.beta_minus_inv_sigma.contains(0.0) {
        RraType::Crra
    } else if ci.alpha_times_1_minus_beta_sigma.lower > 0.0 {
        RraType::Irra
    } else if ci.alpha_times_1_minus_beta_sigma.upper < 0.0 {
        RraType::Drra
    } else {
        RraType::Na
    }
}

/// Classifies a result that carries bootstrap intervals.
///
/// # Errors
///
/// [`Error::MissingCi`] when the result was not bootstrapped.
pub fn classify_rra(result: &EstimationResult) -> Result<RraType> {
    result
        .ci
        .as_ref()
        .map(classify_intervals)
        .ok_or_else(|| Error::MissingCi("classification needs bootstrap intervals".into()))
}

/// Stores bootstrap intervals, the skipped count and the classification in
/// a result.
pub fn attach_bootstrap(result: &mut EstimationResult, outcome: &BootstrapOutcome) {
    result.ci = Some(outcome.ci);
    result.skipped_replicates = Some(outcome.skipped);
    result.rra_type = Some(classify_intervals(&outcome.ci));
}
