//! Monopolistic-competition price equilibrium under LFRRA preferences.
//!
//! A firm with marginal cost `m` facing `u′(q) = νp` sets `p = m/μ` where the
//! inverse markup `μ` satisfies `1 − μ = RRA(q)`. Eliminating `q` through
//! `q = (1−β−μ)/(α(1−σ(1−μ)))` leaves a single equation in `μ` driven by the
//! normalised marginal cost `x = νm/K`:
//!
//! `x = μ · [(1−βσ)/(1−σ(1−μ))]^{β−1/σ} · q(μ)^{−β}`
//!
//! (with `e^{−αq}` replacing the bracket when `σ = 0`). Its solution is a
//! generalised Lambert W function; for CARA it is `μ = W(e·x)` exactly.
//! This module classifies parameter cases, reports markup, quantity and
//! cost ranges, solves the equation by bracketed root finding, checks the
//! second-order condition and evaluates comparative statics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::brent_root;
use crate::utility::{LfrraParams, QuantityInterval};

/// Tolerance used to recognise `βσ = 1`.
const CES_TOL: f64 = 4.0 * f64::EPSILON;

/// Smallest distance to a bracket end explored by the solver.
const TINY: f64 = 1e-300;

/// Parameter cases with qualitatively different equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// `α > 0`, `1 − βσ > 0`, `β ≠ 1`: increasing RRA.
    Case1a,
    /// `α > 0`, `1 − βσ < 0`, `β ∈ (0, 1]`: decreasing RRA.
    Case1b,
    /// `α < 0`, `1 − βσ > 0`, `β ∈ (0, 1)`: decreasing RRA.
    Case2a,
    /// `α < 0`, `1 − βσ < 0`, `β ∈ (0, 1)`: increasing RRA.
    Case2b,
    /// `α = 0`, `β ∈ (0, 1)`: constant markup `1/(1−β)`.
    CesAlphaZero,
    /// `βσ = 1`, `σ > 1`: constant markup `σ/(σ−1)`.
    CesBetaSigma,
}

impl CaseLabel {
    /// Short name used in tabular output.
    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::Case1a => "1a",
            CaseLabel::Case1b => "1b",
            CaseLabel::Case2a => "2a",
            CaseLabel::Case2b => "2b",
            CaseLabel::CesAlphaZero => "ces_alpha0",
            CaseLabel::CesBetaSigma => "ces_betasigma",
        }
    }

    /// Whether the markup is independent of marginal cost.
    pub fn is_ces(&self) -> bool {
        matches!(self, CaseLabel::CesAlphaZero | CaseLabel::CesBetaSigma)
    }
}

/// A real interval with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    /// Lower end.
    pub lower: f64,
    /// Whether `lower` is excluded.
    pub lower_open: bool,
    /// Upper end (may be `+∞`).
    pub upper: f64,
    /// Whether `upper` is excluded.
    pub upper_open: bool,
}

impl Interval {
    fn new(lower: f64, lower_open: bool, upper: f64, upper_open: bool) -> Self {
        Self { lower, lower_open, upper, upper_open }
    }

    /// Membership test honouring open and closed ends.
    pub fn contains(&self, v: f64) -> bool {
        let lo = if self.lower_open { v > self.lower } else { v >= self.lower };
        let hi = if self.upper_open { v < self.upper } else { v <= self.upper };
        lo && hi
    }
}

/// Equilibrium at one normalised marginal cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkupSolution {
    /// Inverse markup `μ = m/p ∈ (0, 1]`.
    pub mu: f64,
    /// Markup `1/μ ≥ 1`.
    pub markup: f64,
    /// Equilibrium quantity.
    pub q: f64,
    /// Normalised marginal cost `x = νm/K`.
    pub x: f64,
    /// Parameter case.
    pub case: CaseLabel,
    /// Second-order condition at the solution.
    pub soc_ok: bool,
}

/// Classifies the parameter triple into its equilibrium case.
///
/// # Errors
///
/// [`Error::Inadmissible`] for combinations without an interior
/// equilibrium (for instance `α < 0` with `β = 0`, or `β = 1` with
/// `σ < 1`).
pub fn classify_case(params: &LfrraParams) -> Result<CaseLabel> {
    let LfrraParams { alpha, beta, sigma } = *params;
    let d = params.one_minus_beta_sigma();
    let interior = beta > 0.0 && beta < 1.0;
    let case = if alpha == 0.0 {
        interior.then_some(CaseLabel::CesAlphaZero)
    } else if (beta * sigma - 1.0).abs() <= CES_TOL {
        (sigma > 1.0).then_some(CaseLabel::CesBetaSigma)
    } else if alpha > 0.0 && d > 0.0 {
        (beta != 1.0).then_some(CaseLabel::Case1a)
    } else if alpha > 0.0 && d < 0.0 {
        (beta > 0.0).then_some(CaseLabel::Case1b)
    } else if alpha < 0.0 && d > 0.0 {
        interior.then_some(CaseLabel::Case2a)
    } else if alpha < 0.0 && d < 0.0 {
        interior.then_some(CaseLabel::Case2b)
    } else {
        None
    };
    case.ok_or_else(|| {
        Error::Inadmissible(format!("no monopolistic-competition equilibrium for α={alpha}, β={beta}, σ={sigma}"))
    })
}

/// `Δ = √((1−β)(1−βσ))`.
fn delta(params: &LfrraParams) -> f64 {
    ((1.0 - params.beta) * params.one_minus_beta_sigma()).sqrt()
}

/// The inverse markup `μ̄` bounding Case 2a.
fn mu_bar(params: &LfrraParams) -> f64 {
    let b = 1.0 - params.beta;
    (b * params.sigma + delta(params)) / (b * params.sigma + 1.0)
}

/// Ranges of the markup `1/μ` and of equilibrium quantities for the case of
/// `params`.
///
/// # Errors
///
/// As [`classify_case`].
pub fn markup_quantity_ranges(params: &LfrraParams) -> Result<(Interval, QuantityInterval)> {
    let case = classify_case(params)?;
    let LfrraParams { alpha, beta, sigma } = *params;
    let inv_one_minus_beta = 1.0 / (1.0 - beta);
    let q_all = QuantityInterval { lower: 0.0, lower_open: false, upper: f64::INFINITY };
    let q_upper = |upper: f64| QuantityInterval { lower: 0.0, lower_open: false, upper };
    let ces_markup = sigma / (sigma - 1.0);
    Ok(match case {
        CaseLabel::CesAlphaZero => (Interval::new(inv_one_minus_beta, false, inv_one_minus_beta, false), q_all),
        CaseLabel::CesBetaSigma => (Interval::new(ces_markup, false, ces_markup, false), q_all),
        CaseLabel::Case1a if sigma <= 1.0 => {
            let upper = if sigma == 1.0 { f64::INFINITY } else { -(1.0 - beta) / (alpha * (sigma - 1.0)) };
            (Interval::new(inv_one_minus_beta, false, f64::INFINITY, true), q_upper(upper))
        }
        CaseLabel::Case1a => (Interval::new(inv_one_minus_beta, false, ces_markup, true), q_all),
        CaseLabel::Case1b if beta == 1.0 => (
            Interval::new(ces_markup, true, f64::INFINITY, true),
            QuantityInterval { lower: 0.0, lower_open: true, upper: f64::INFINITY },
        ),
        CaseLabel::Case1b => (Interval::new(ces_markup, true, inv_one_minus_beta, false), q_all),
        CaseLabel::Case2a => {
            let (lower, upper) = if sigma == 1.0 {
                ((2.0 - beta) / (2.0 * (1.0 - beta)), -beta / (2.0 * alpha))
            } else {
                let b = 1.0 - beta;
                let dl = delta(params);
                ((b * sigma + 1.0) / (b * sigma + dl), -(b - dl) / (alpha * (sigma - 1.0)))
            };
            (Interval::new(lower, true, inv_one_minus_beta, false), q_upper(upper))
        }
        CaseLabel::Case2b => (
            Interval::new(inv_one_minus_beta, false, f64::INFINITY, true),
            q_upper(-(1.0 - beta) / (alpha * (sigma - 1.0))),
        ),
    })
}

/// The range of normalised marginal costs `x` for which an equilibrium
/// exists.
///
/// `(0, ∞)` in general; `(0, 1]` when `β = 0` (Case 1a);
/// `(0, α(σ−1))` when `β = 1` (Case 1b); and `(x̲, ∞)` in Case 2a with `x̲`
/// the value of the first-order condition at `μ̄`.
///
/// # Errors
///
/// As [`classify_case`].
pub fn x_domain(params: &LfrraParams) -> Result<Interval> {
    let case = classify_case(params)?;
    let LfrraParams { alpha, beta, sigma } = *params;
    Ok(match case {
        CaseLabel::Case1a if beta == 0.0 => Interval::new(0.0, true, 1.0, false),
        CaseLabel::Case1b if beta == 1.0 => Interval::new(0.0, true, alpha * (sigma - 1.0), true),
        CaseLabel::Case2a => Interval::new(x_lower_case2a(params), true, f64::INFINITY, true),
        _ => Interval::new(0.0, true, f64::INFINITY, true),
    })
}

/// `x̲ = μ̄ · [(1−βσ)/(1−σ(1−μ̄))]^{β−1/σ} · q(μ̄)^{−β}` with
/// `q(μ̄) = (1−β−μ̄)/(α(1−σ(1−μ̄)))`.
fn x_lower_case2a(params: &LfrraParams) -> f64 {
    let LfrraParams { alpha, beta, sigma } = *params;
    let mb = mu_bar(params);
    let g = 1.0 - sigma * (1.0 - mb);
    let q = (1.0 - beta - mb) / (alpha * g);
    let ln = if sigma == 0.0 {
        mb.ln() - alpha * q - beta * q.ln()
    } else {
        mb.ln() + (beta - 1.0 / sigma) * (params.one_minus_beta_sigma() / g).ln() - beta * q.ln()
    };
    ln.exp()
}

/// Second-order condition of the pricing problem at quantity `q`:
/// `αq/(αq+β) + (1−αq−β)/(ασq+1) > 0`. At `β = 0`, `q = 0` the limit value
/// 2 is used.
pub fn soc_check(params: &LfrraParams, q: f64) -> bool {
    let LfrraParams { alpha, beta, sigma } = *params;
    if beta == 0.0 && q == 0.0 {
        return true;
    }
    let num = alpha * q + beta;
    let den = alpha * sigma * q + 1.0;
    if !(num > 0.0 && den > 0.0) {
        return false;
    }
    alpha * q / num + (1.0 - alpha * q - beta) / den > 0.0
}

/// Where the far end of the solving bracket sits.
#[derive(Debug, Clone, Copy, PartialEq)]
enum FarEnd {
    /// `μ → 0`.
    MuZero,
    /// `μ → (σ−1)/σ`, where `1 − σ(1−μ) → 0`.
    Ces,
    /// `μ → μ̄` (Case 2a); the equation stays finite there.
    MuBar,
}

/// The first-order condition written in `d = 1 − β − μ`, evaluated from the
/// signed offset `d` and the distance `e = |d_far − d|` to the far end so
/// that both ends of the bracket are resolved without cancellation.
struct Foc {
    alpha: f64,
    beta: f64,
    sigma: f64,
    omb: f64,
    d_far: f64,
    far: FarEnd,
}

impl Foc {
    fn new(params: &LfrraParams, case: CaseLabel) -> Self {
        let LfrraParams { alpha, beta, sigma } = *params;
        let (mu_far, far) = match case {
            CaseLabel::Case1a if sigma > 1.0 => ((sigma - 1.0) / sigma, FarEnd::Ces),
            CaseLabel::Case1b => ((sigma - 1.0) / sigma, FarEnd::Ces),
            CaseLabel::Case2a => (mu_bar(params), FarEnd::MuBar),
            _ => (0.0, FarEnd::MuZero),
        };
        let d_far = match far {
            FarEnd::Ces => params.one_minus_beta_sigma() / sigma,
            _ => 1.0 - beta - mu_far,
        };
        Self { alpha, beta, sigma, omb: params.one_minus_beta_sigma(), d_far, far }
    }

    /// Returns `(μ, g, q)` with `g = 1 − σ(1−μ)`.
    fn state(&self, d: f64, e: f64) -> (f64, f64, f64) {
        let mu = match self.far {
            FarEnd::MuZero if e < 0.5 * self.d_far.abs() => e,
            _ => 1.0 - self.beta - d,
        };
        let g = match self.far {
            FarEnd::Ces => self.sigma * self.d_far.signum() * e,
            _ => self.omb - self.sigma * d,
        };
        let q = d / (self.alpha * g);
        (mu, g, q)
    }

    /// `ln LHS(μ) − ln x`.
    fn residual(&self, d: f64, e: f64, ln_x: f64) -> f64 {
        let (mu, g, _) = self.state(d, e);
        let (alpha, beta, sigma) = (self.alpha, self.beta, self.sigma);
        let ln_q = if beta == 0.0 { 0.0 } else { d.abs().ln() - alpha.abs().ln() - g.abs().ln() };
        let ln_lhs = if sigma == 0.0 {
            mu.ln() - d - beta * ln_q
        } else {
            let r = sigma * d / self.omb;
            let ln_a = if r.abs() < 0.5 { -(-r).ln_1p() } else { self.omb.abs().ln() - g.abs().ln() };
            mu.ln() + (beta - 1.0 / sigma) * ln_a - beta * ln_q
        };
        ln_lhs - ln_x
    }
}

/// Solves the equilibrium first-order condition for the inverse markup at
/// normalised marginal cost `x`.
///
/// The root is bracketed on the open `μ`-interval of the case, where the
/// equation is strictly monotone. The bracket is narrowed by geometric
/// bisection in the distance to the nearer end, then by arithmetic
/// bisection, and finished with Brent's method to relative accuracy `tol`
/// in `1 − β − μ`. Constant-markup cases, the CREMR case `β = 1` and the
/// boundary `x = 1` with `β = 0` are closed forms.
///
/// # Errors
///
/// [`Error::Domain`] if `x` lies outside [`x_domain`]; [`Error::Bracket`] if
/// the theoretical bracket fails numerically (e.g. a root closer than
/// `1e−300` to an end).
pub fn solve_markup(params: &LfrraParams, x: f64, tol: f64) -> Result<MarkupSolution> {
    let case = classify_case(params)?;
    let dom = x_domain(params)?;
    if !(x.is_finite() && dom.contains(x)) {
        return Err(Error::domain(format!(
            "x = {x} outside the admissible range ({}, {}) for case {}",
            dom.lower,
            dom.upper,
            case.name()
        )));
    }
    let LfrraParams { alpha, beta, sigma } = *params;
    let finish = |mu: f64, q: f64| MarkupSolution { mu, markup: 1.0 / mu, q, x, case, soc_ok: soc_check(params, q) };
    if case.is_ces() {
        let mu = 1.0 - beta;
        return Ok(finish(mu, (mu / x).powf(1.0 / beta)));
    }
    if beta == 0.0 && x == 1.0 {
        return Ok(finish(1.0, 0.0));
    }
    if beta == 1.0 {
        // μ = (σ−1)/σ · (1 − [x/(α(σ−1))]^σ)
        // with 1 − σ(1−μ) = −(σ−1)·r^σ, r = x/(α(σ−1)), exactly.
        let ratio = x / (alpha * (sigma - 1.0));
        let r_pow = (sigma * ratio.ln()).exp();
        let mu = (sigma - 1.0) / sigma * -(sigma * ratio.ln()).exp_m1();
        let q = mu / (alpha * (sigma - 1.0) * r_pow);
        return Ok(finish(mu, q));
    }
    let foc = Foc::new(params, case);
    let (d, e) = solve_foc(&foc, x.ln(), tol)?;
    let (mu, _, q) = foc.state(d, e);
    Ok(finish(mu, q))
}

/// Returns the root as `(d, e)`.
fn solve_foc(foc: &Foc, ln_x: f64, tol: f64) -> Result<(f64, f64)> {
    let width = foc.d_far.abs();
    let sgn = foc.d_far.signum();
    // Evaluate with t = |d| measured from the near end, or e measured from
    // the far end.
    let from_near = |t: f64| foc.residual(sgn * t, width - t, ln_x);
    let from_far = |e: f64| foc.residual(sgn * (width - e), e, ln_x);
    let half = 0.5 * width;
    let f_half = from_near(half);
    if f_half == 0.0 {
        return Ok((sgn * half, half));
    }
    // The residual decreases from +∞ (near end) to its far-end value.
    let near_side = f_half < 0.0;
    let root =
        if near_side { find_root(&from_near, true, half, tol)? } else { find_root(&from_far, false, half, tol)? };
    Ok(if near_side { (sgn * root, width - root) } else { (sgn * (width - root), root) })
}

/// Finds the root of `f` on `(0, half]` where `f(half)` is known to have the
/// sign opposite to `f(0⁺)`. `positive_at_zero` gives the sign of `f(0⁺)`.
fn find_root<F: Fn(f64) -> f64>(f: &F, positive_at_zero: bool, half: f64, tol: f64) -> Result<f64> {
    let wanted = |v: f64| if positive_at_zero { v > 0.0 } else { v < 0.0 };
    let mut lo = half;
    let mut hi = half;
    // Step towards zero until the sign flips.
    let mut found = false;
    let mut step = 0.5;
    while lo > TINY {
        lo = (lo * step).max(TINY);
        let v = f(lo);
        if v == 0.0 {
            return Ok(lo);
        }
        if wanted(v) {
            found = true;
            break;
        }
        hi = lo;
        step *= step;
        if lo == TINY {
            break;
        }
    }
    if !found {
        return Err(Error::Bracket(format!("first-order condition not bracketed above {TINY}")));
    }
    // Geometric bisection while the bracket spans orders of magnitude.
    while hi / lo > 4.0 {
        let mid = (lo * hi).sqrt();
        if wanted(f(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Arithmetic bisection to a loose relative width, then Brent.
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if wanted(f(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    brent_root(f, lo, hi, tol * lo)
}

/// Signs and slope of the comparative statics in marginal cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparativeStatics {
    /// Inverse markup at `x`.
    pub mu: f64,
    /// `dμ/dx` from its closed form.
    pub dmu_dx: f64,
    /// Sign of `d(1/μ)/dm` (−1, 0 or +1).
    pub markup_slope_sign: i8,
    /// Sign of `dp/dm`.
    pub dprice_dm_sign: i8,
    /// Sign of `dq/dm`.
    pub dq_dm_sign: i8,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Comparative statics of the equilibrium in marginal cost.
///
/// `dμ/dx = [(1−σ(1−μ))/x] / [1 + ((1−β)(1−μ)/μ)·(1−σ(1−μ))/(1−β−μ)]`;
/// the price slope is `(1/μ)(1 − x μ′/μ)·ν/K` and the quantity slope is
/// `−(1−βσ)/(α(1−σ(1−μ))²)·μ′·ν/K`. Constant-markup cases have `μ′ = 0`.
///
/// # Errors
///
/// As [`solve_markup`].
pub fn comparative_statics(params: &LfrraParams, x: f64) -> Result<ComparativeStatics> {
    let sol = solve_markup(params, x, 1e-14)?;
    let mu = sol.mu;
    let LfrraParams { alpha, beta, sigma } = *params;
    if sol.case.is_ces() {
        return Ok(ComparativeStatics { mu, dmu_dx: 0.0, markup_slope_sign: 0, dprice_dm_sign: 1, dq_dm_sign: -1 });
    }
    let g = 1.0 - sigma * (1.0 - mu);
    let middle = if beta == 0.0 {
        g / mu
    } else if beta == 1.0 {
        0.0
    } else {
        (1.0 - beta) * (1.0 - mu) / mu * g / (1.0 - beta - mu)
    };
    let dmu_dx = (g / x) / (1.0 + middle);
    let dprice = (1.0 - x * dmu_dx / mu) / mu;
    let dq = -params.one_minus_beta_sigma() / (alpha * g * g) * dmu_dx;
    Ok(ComparativeStatics {
        mu,
        dmu_dx,
        markup_slope_sign: -sign(dmu_dx),
        dprice_dm_sign: sign(dprice),
        dq_dm_sign: sign(dq),
    })
}

/// One row of an equilibrium curve over marginal costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    /// Marginal cost.
    pub m: f64,
    /// Normalised marginal cost `νm/K`.
    pub x: f64,
    /// Inverse markup (NaN when out of domain).
    pub mu: f64,
    /// Price `m/μ` (NaN when out of domain).
    pub price: f64,
    /// Quantity (NaN when out of domain).
    pub q: f64,
    /// Second-order condition at the solution.
    pub soc_ok: bool,
    /// Whether `x` lies in the admissible domain.
    pub in_domain: bool,
}

/// Solves the equilibrium on a grid of marginal costs with `x = νm/K`.
/// Points outside the cost domain are flagged rather than dropped.
///
/// # Errors
///
/// [`Error::Empty`] for an empty grid, [`Error::Domain`] for non-positive
/// `ν` or `K`, and [`classify_case`] errors.
pub fn equilibrium_curve(params: &LfrraParams, nu: f64, k_scale: f64, m_grid: &[f64]) -> Result<Vec<CurveRow>> {
    if m_grid.is_empty() {
        return Err(Error::Empty("marginal-cost grid is empty".into()));
    }
    if !(nu > 0.0 && k_scale > 0.0) {
        return Err(Error::domain(format!("ν and K must be positive (ν={nu}, K={k_scale})")));
    }
    classify_case(params)?;
    let rows = m_grid
        .par_iter()
        .map(|&m| {
            let x = nu * m / k_scale;
            match solve_markup(params, x, 1e-14) {
                Ok(s) => CurveRow { m, x, mu: s.mu, price: m / s.mu, q: s.q, soc_ok: s.soc_ok, in_domain: true },
                Err(_) => {
                    CurveRow { m, x, mu: f64::NAN, price: f64::NAN, q: f64::NAN, soc_ok: false, in_domain: false }
                }
            }
        })
        .collect();
    Ok(rows)
}
