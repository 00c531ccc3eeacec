//! Synthetic firm data generated from a known parameter triple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::data::FirmObservation;
use crate::error::{Error, Result};
use crate::utility::{admissible_q_range, rra, LfrraParams};

/// Smallest and largest `1 − μ` written, keeping markups finite and above one.
const Y_CLIP: (f64, f64) = (1e-9, 1.0 - 1e-9);

/// Quantity distribution and labelling of generated rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Standard deviation of `ln q`; the log-normal is centred so that
    /// `E[q] = 1`.
    pub log_sd: f64,
    /// Sector identifier written to every row.
    pub sector_id: i64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { log_sd: 2.0, sector_id: 1 }
    }
}

/// [`synth_generate_with`] using the default quantity distribution.
pub fn synth_generate(params: &LfrraParams, n: usize, noise_sd: f64, seed: u64) -> Result<Vec<FirmObservation>> {
    synth_generate_with(params, n, noise_sd, seed, &SynthConfig::default())
}

/// Draws `n` observations with log-normal quantities restricted to the
/// admissible range where `0 < RRA < 1`, and sets
/// `1 − μ = RRA(q) + N(0, noise_sd²)`, clipped to `[1e−9, 1 − 1e−9]`.
///
/// The output depends only on the arguments.
///
/// # Errors
///
/// [`Error::Config`] for `n = 0`, a negative noise or log-sd, and
/// [`Error::Inadmissible`] when the parameters admit no usable quantity.
pub fn synth_generate_with(
    params: &LfrraParams,
    n: usize,
    noise_sd: f64,
    seed: u64,
    cfg: &SynthConfig,
) -> Result<Vec<FirmObservation>> {
    if n == 0 {
        return Err(Error::Config("need at least one observation".into()));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::Config(format!("noise sd must be non-negative (got {noise_sd})")));
    }
    if !(cfg.log_sd > 0.0 && cfg.log_sd.is_finite()) {
        return Err(Error::Config(format!("log-sd must be positive (got {})", cfg.log_sd)));
    }
    let range = admissible_q_range(params)?;
    let quantities =
        LogNormal::new(-0.5 * cfg.log_sd * cfg.log_sd, cfg.log_sd).map_err(|e| Error::Config(e.to_string()))?;
    let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while rows.len() < n {
        attempts += 1;
        if attempts > 1000 * n + 10_000 {
            return Err(Error::Inadmissible(format!(
                "too few quantities with 0 < RRA < 1 for α={}, β={}, σ={}",
                params.alpha, params.beta, params.sigma
            )));
        }
        let q: f64 = quantities.sample(&mut rng);
        if !range.contains(q) {
            continue;
        }
        let r = match rra(params, q) {
            Ok(r) if r > 0.0 && r < 1.0 => r,
            _ => continue,
        };
        let shock = if noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        let y = (r + shock).clamp(Y_CLIP.0, Y_CLIP.1);
        let i = rows.len();
        rows.push(FirmObservation {
            sector_id: cfg.sector_id,
            firm_id: format!("f{i:06}"),
            year: 2000 + rng.random_range(0..10),
            markup: 1.0 / (1.0 - y),
            quantity: q,
        });
    }
    Ok(rows)
}
