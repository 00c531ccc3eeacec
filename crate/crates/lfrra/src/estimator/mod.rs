//! Estimation of `(α, β, σ)` from firm-level markups and quantities.
//!
//! The estimating equation equates the observed `1 − μ(ω) = 1 − 1/markup`
//! with the fitted relative risk aversion `(αq+β)/(ασq+1)` and minimises the
//! residual sum of squares subject to `αq+β > 0`, `ασq+1 > 0` and
//! `0 < RRA ≤ 1` at every observation. The search profiles `(β, σ)` out for
//! each fixed `α` (inner loop) and brackets `α` with a refining grid (outer
//! loop). Percentile-bootstrap intervals drive the IRRA/DRRA/CRRA
//! classification.

mod alt;
mod bootstrap;
mod data;
mod fit;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::LfrraParams;

pub use alt::{fit_klenow_willis, fit_mnp, KwResult, MnpFit};
pub use bootstrap::{
    attach_bootstrap, bootstrap, classify_intervals, classify_rra, percentile, BootstrapOutcome, Replicate,
};
pub use data::{prepare_data, FirmObservation, PreparedData, RawObservation};
pub use fit::{
    fit_constrained_beta, fit_implicit, fit_inner, fit_lfrra, fit_specification, rss, soc_verify_fitted, InnerFit,
};
pub use synth::{synth_generate, synth_generate_with, SynthConfig};

/// Tuning of the outer grid search, trimming and bootstrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    /// Grid points per outer iteration.
    pub grid_steps: usize,
    /// Grid points per outer iteration inside bootstrap replicates.
    pub bootstrap_grid_steps: usize,
    /// Expansion factor `ξ > 1` applied when the argmin hits a grid end.
    pub expansion_factor: f64,
    /// Upper end of the initial bracket of the ascending run.
    pub ascend_upper: f64,
    /// Upper end of the initial bracket of the descending run.
    pub descend_upper: f64,
    /// Relative tolerance on successive `α̂` for convergence.
    pub convergence_tol: f64,
    /// Outer iterations before giving up.
    pub max_iterations: usize,
    /// Fraction trimmed from each tail of markups and quantities.
    pub trim_fraction: f64,
    /// Number of bootstrap replicates.
    pub bootstrap_reps: usize,
    /// Seed of the bootstrap random streams.
    pub seed: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            grid_steps: 100,
            bootstrap_grid_steps: 50,
            expansion_factor: 2.0,
            ascend_upper: 450.0,
            descend_upper: 1.5e8,
            convergence_tol: 1e-12,
            max_iterations: 200,
            trim_fraction: 0.03,
            bootstrap_reps: 200,
            seed: 0,
        }
    }
}

impl EstimationConfig {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<()> {
        if self.grid_steps < 3 || self.bootstrap_grid_steps < 3 {
            return Err(Error::Config("grid steps must be at least 3".into()));
        }
        if !(self.expansion_factor > 1.0 && self.expansion_factor.is_finite()) {
            return Err(Error::Config(format!("expansion factor must exceed 1 (got {})", self.expansion_factor)));
        }
        if !(self.ascend_upper > 0.0 && self.descend_upper > 0.0) {
            return Err(Error::Config("initial upper brackets must be positive".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Config("convergence tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("iteration cap must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            return Err(Error::Config(format!("trim fraction must lie in [0, 0.5) (got {})", self.trim_fraction)));
        }
        Ok(())
    }
}

/// Which restriction of the model is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Specification {
    /// Unrestricted `(α, β, σ)`.
    Lfrra,
    /// `β = 0` (the HARA family).
    Beta0,
    /// `β = 1` (the CREMR family).
    Beta1,
    /// The translated CREMR form with `β = 1`, `α = −1/(γσ)`.
    Mnp,
    /// RRA `q^{ε/σ̄}/σ̄`; returned as a [`KwResult`].
    Kw,
    /// Unrestricted fit read under implicit additivity (`α̃ = α/U`).
    Implicit,
}

impl Specification {
    /// Every specification in the fixed comparison order.
    pub const COMPARISON_ORDER: [Specification; 5] =
        [Specification::Lfrra, Specification::Beta0, Specification::Beta1, Specification::Mnp, Specification::Kw];

    /// Lower-case name used on the command line and in output.
    pub fn name(&self) -> &'static str {
        match self {
            Specification::Lfrra => "lfrra",
            Specification::Beta0 => "beta0",
            Specification::Beta1 => "beta1",
            Specification::Mnp => "mnp",
            Specification::Kw => "kw",
            Specification::Implicit => "implicit",
        }
    }
}

impl fmt::Display for Specification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Specification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lfrra" => Ok(Specification::Lfrra),
            "beta0" => Ok(Specification::Beta0),
            "beta1" => Ok(Specification::Beta1),
            "mnp" => Ok(Specification::Mnp),
            "kw" => Ok(Specification::Kw),
            "implicit" => Ok(Specification::Implicit),
            other => Err(Error::Config(format!("unknown specification '{other}'"))),
        }
    }
}

/// Shape of relative risk aversion in quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RraType {
    /// Increasing RRA.
    #[serde(rename = "IRRA")]
    Irra,
    /// Decreasing RRA.
    #[serde(rename = "DRRA")]
    Drra,
    /// Constant RRA.
    #[serde(rename = "CRRA")]
    Crra,
    /// Not determined at the 95% level.
    #[serde(rename = "NA")]
    Na,
}

impl RraType {
    /// Upper-case label.
    pub fn name(&self) -> &'static str {
        match self {
            RraType::Irra => "IRRA",
            RraType::Drra => "DRRA",
            RraType::Crra => "CRRA",
            RraType::Na => "NA",
        }
    }
}

/// A two-sided percentile interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval95 {
    /// 2.5th percentile.
    pub lower: f64,
    /// 97.5th percentile.
    pub upper: f64,
}

impl Interval95 {
    /// Whether `v` lies in the closed interval.
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Bootstrap intervals of the parameters and derived statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    /// Interval for `α`.
    pub alpha: Interval95,
    /// Interval for `β`.
    pub beta: Interval95,
    /// Interval for `σ`.
    pub sigma: Interval95,
    /// Interval for `β − 1/σ`.
    pub beta_minus_inv_sigma: Interval95,
    /// Interval for `α(1 − βσ)`.
    pub alpha_times_1_minus_beta_sigma: Interval95,
}

/// A fitted specification with its derived statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    /// Specification that produced the fit.
    pub spec: Specification,
    /// Fitted `α` in units of the scaled quantity `q/q̄`.
    pub alpha_hat: f64,
    /// Fitted `β`.
    pub beta_hat: f64,
    /// Fitted `σ`.
    pub sigma_hat: f64,
    /// Residual sum of squares at the fitted triple.
    pub rss: f64,
    /// Number of observations used.
    pub n_obs: usize,
    /// `β̂ − 1/σ̂`.
    pub beta_minus_inv_sigma: f64,
    /// `α̂(1 − β̂σ̂)`.
    pub alpha_times_1_minus_beta_sigma: f64,
    /// RRA shape, available once bootstrap intervals are attached.
    pub rra_type: Option<RraType>,
    /// Bootstrap intervals, when computed.
    pub ci: Option<ConfidenceIntervals>,
    /// Bootstrap replicates whose fit failed, when bootstrapped.
    pub skipped_replicates: Option<usize>,
    /// Whether the pricing second-order condition holds at every observed
    /// quantity and on a dense grid up to the largest one.
    pub soc_all_ok: bool,
    /// False when `σ` does not enter the objective (`α̂ = 0`).
    pub sigma_identified: bool,
    /// Mean raw quantity; `α` in raw units is `alpha_hat / quantity_scale`.
    pub quantity_scale: f64,
    /// Outer iterations of the winning run.
    pub outer_iterations: usize,
    /// Set when `alpha_hat` is to be read as `α̃ = α/U` (implicit
    /// additivity; `U` is not separately identified).
    pub implicit_additivity: bool,
    /// The underlying `(γ, σ)` of a translated-CREMR fit.
    pub mnp: Option<MnpFit>,
}

impl EstimationResult {
    /// The fitted triple.
    pub fn params(&self) -> LfrraParams {
        LfrraParams { alpha: self.alpha_hat, beta: self.beta_hat, sigma: self.sigma_hat }
    }
}

/// `β − 1/σ` and `α(1 − βσ)` of a triple.
pub fn derived_statistics(alpha: f64, beta: f64, sigma: f64) -> (f64, f64) {
    (beta - 1.0 / sigma, alpha * (1.0 - beta * sigma))
}
