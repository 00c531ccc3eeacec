//! The linear fractional relative risk aversion (LFRRA) utility family.
//!
//! Relative risk aversion is `(αq+β)/(ασq+1)`. This module provides the RRA
//! and its slope, the admissible quantity ranges, marginal utility and its
//! derivative, the utility level across the general hypergeometric case, the
//! HARA and CREMR limits and every named special case, and the implied
//! demand function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::brent_root;
use crate::specfun::{beta_weighted_integral, exp_integral_ei, hyp2f1, lower_incomplete_gamma, SeriesConfig};

/// Above this `|z|` the hypergeometric series is replaced by the integral
/// representation.
pub const SERIES_SWITCH: f64 = 0.95;

/// Tolerance used to recognise `βσ = 1` (CRRA through the second channel).
const CRRA_TOL: f64 = 4.0 * f64::EPSILON;

/// The LFRRA parameter triple `(α, β, σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfrraParams {
    /// Slope of the RRA numerator (units: 1/quantity).
    pub alpha: f64,
    /// RRA intercept, in `[0, 1]`.
    pub beta: f64,
    /// Ratio of the denominator slope to the numerator slope.
    pub sigma: f64,
}

impl LfrraParams {
    /// Builds a parameter triple, checking finiteness and `β ∈ [0, 1]`.
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && sigma.is_finite()) {
            return Err(Error::Inadmissible(format!("parameters must be finite (α={alpha}, β={beta}, σ={sigma})")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Inadmissible(format!("β must lie in [0, 1] (β={beta})")));
        }
        Ok(Self { alpha, beta, sigma })
    }

    /// `1 − βσ`, whose sign (times that of α) is the sign of the RRA slope.
    pub fn one_minus_beta_sigma(&self) -> f64 {
        1.0 - self.beta * self.sigma
    }

    /// True when RRA is constant: `α = 0` or `βσ = 1`.
    pub fn is_crra(&self) -> bool {
        self.alpha == 0.0 || (self.beta * self.sigma - 1.0).abs() <= CRRA_TOL
    }
}

/// An interval of quantities `[lower, upper)` (or `(lower, upper)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityInterval {
    /// Lower end, normally zero.
    pub lower: f64,
    /// Whether `lower` itself is excluded.
    pub lower_open: bool,
    /// Upper end (always excluded); may be `+∞`.
    pub upper: f64,
}

impl QuantityInterval {
    /// Membership test honouring the open/closed lower end.
    pub fn contains(&self, q: f64) -> bool {
        let above = if self.lower_open { q > self.lower } else { q >= self.lower };
        above && q < self.upper
    }
}

/// Selects which closed, series or integral form is used for the utility
/// level. Chosen explicitly by the caller rather than inferred from
/// floating-point equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    /// Constant RRA (`α = 0` or `βσ = 1`): power or log utility.
    Crra,
    /// General case `β ∈ (0,1)`, `σ ∉ {0, 1}`: hypergeometric form.
    GeneralHypergeometric,
    /// `β = 0`: hyperbolic absolute risk aversion.
    HaraLimit,
    /// `β = 1`: constant revenue elasticity of marginal revenue.
    CremrLimit,
    /// `σ = 0`, `β ∈ (0,1)`: lower incomplete gamma utility.
    IncGamma,
    /// `σ = 1`, `β ∈ (0,1)`: incomplete beta utility.
    IncBeta,
    /// `σ = 0`, `β = 0`: constant absolute risk aversion.
    Cara,
    /// `σ = −1`, `β = 0`: quadratic utility.
    Quadratic,
    /// `σ = 1`, `β = 0`: translated logarithm.
    TranslatedLog,
    /// `σ = 0`, `β = 1`: exponential integral utility.
    ExpIntegral,
    /// `σ = 1`, `β = 1`: logarithmic utility.
    Log,
    /// CREMR with a quantity threshold `γ`, scale `β̃` and shift `κ`, valid
    /// for `q > γ > 0`, `σ > 0`. The LFRRA parameters are `α = −1/(γσ)`,
    /// `β = 1`.
    MnpCremr {
        /// Quantity threshold γ > 0.
        gamma: f64,
        /// Scale β̃ > 0.
        beta_tilde: f64,
        /// Additive shift κ.
        kappa: f64,
    },
}

impl Variant {
    /// Picks the variant whose defining equalities hold exactly for
    /// `params`, falling back to [`Variant::GeneralHypergeometric`].
    #[allow(clippy::redundant_guards)] // explicit float comparisons read clearer than float patterns
    pub fn natural(params: &LfrraParams) -> Variant {
        let LfrraParams { beta, sigma, .. } = *params;
        if params.is_crra() {
            return Variant::Crra;
        }
        match (beta, sigma) {
            (b, s) if b == 0.0 && s == 0.0 => Variant::Cara,
            (b, s) if b == 0.0 && s == -1.0 => Variant::Quadratic,
            (b, s) if b == 0.0 && s == 1.0 => Variant::TranslatedLog,
            (b, s) if b == 1.0 && s == 0.0 => Variant::ExpIntegral,
            (b, s) if b == 1.0 && s == 1.0 => Variant::Log,
            (b, _) if b == 0.0 => Variant::HaraLimit,
            (b, _) if b == 1.0 => Variant::CremrLimit,
            (_, s) if s == 0.0 => Variant::IncGamma,
            (_, s) if s == 1.0 => Variant::IncBeta,
            _ => Variant::GeneralHypergeometric,
        }
    }

    /// Short lowercase name, used in tabular output.
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Crra => "crra",
            Variant::GeneralHypergeometric => "general",
            Variant::HaraLimit => "hara",
            Variant::CremrLimit => "cremr",
            Variant::IncGamma => "inc_gamma",
            Variant::IncBeta => "inc_beta",
            Variant::Cara => "cara",
            Variant::Quadratic => "quadratic",
            Variant::TranslatedLog => "translated_log",
            Variant::ExpIntegral => "exp_integral",
            Variant::Log => "log",
            Variant::MnpCremr { .. } => "mnp_cremr",
        }
    }
}

/// A fully specified utility function `u(q)`: parameters, scale `K > 0`,
/// additive constant `C` and the representation variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    /// The RRA parameters.
    pub params: LfrraParams,
    /// Multiplicative scale `K > 0`.
    pub k_scale: f64,
    /// Additive constant `C`.
    pub c_shift: f64,
    /// Representation selector.
    pub variant: Variant,
}

impl UtilitySpec {
    /// Builds a spec, checking `K > 0` and the variant's parameter
    /// constraints.
    ///
    /// # Errors
    ///
    /// [`Error::VariantMismatch`] when the variant's defining equalities or
    /// admissibility conditions fail, [`Error::Inadmissible`] for `K ≤ 0`.
    pub fn new(params: LfrraParams, k_scale: f64, c_shift: f64, variant: Variant) -> Result<Self> {
        if !(k_scale > 0.0 && k_scale.is_finite()) {
            return Err(Error::Inadmissible(format!("K must be positive (K={k_scale})")));
        }
        if !c_shift.is_finite() {
            return Err(Error::Inadmissible("C must be finite".into()));
        }
        check_variant(&params, &variant)?;
        Ok(Self { params, k_scale, c_shift, variant })
    }

    /// Builds a spec with [`Variant::natural`].
    pub fn natural(params: LfrraParams, k_scale: f64, c_shift: f64) -> Result<Self> {
        Self::new(params, k_scale, c_shift, Variant::natural(&params))
    }

    /// Builds the thresholded CREMR utility
    /// `κ + β̃σ/(σ−1)·(q−γ)^{(σ−1)/σ}/q·[q + γ(σ−1)₂F₁(1,1;1+1/σ;γ/q)]`.
    pub fn mnp_cremr(gamma: f64, beta_tilde: f64, sigma: f64, kappa: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::VariantMismatch(format!("MNP CREMR requires γ > 0 (γ={gamma})")));
        }
        if !(sigma > 0.0 && sigma != 1.0 && sigma.is_finite()) {
            return Err(Error::VariantMismatch(format!("MNP CREMR requires σ > 0, σ ≠ 1 (σ={sigma})")));
        }
        let params = LfrraParams::new(-1.0 / (gamma * sigma), 1.0, sigma)?;
        Self::new(params, beta_tilde, kappa, Variant::MnpCremr { gamma, beta_tilde, kappa })
    }
}

fn check_variant(p: &LfrraParams, v: &Variant) -> Result<()> {
    let LfrraParams { alpha, beta, sigma } = *p;
    let interior = beta > 0.0 && beta < 1.0;
    let ok = match v {
        Variant::Crra => p.is_crra(),
        Variant::GeneralHypergeometric => interior && sigma != 0.0 && sigma != 1.0,
        Variant::HaraLimit => beta == 0.0 && sigma != 0.0 && sigma != 1.0 && alpha > 0.0,
        Variant::CremrLimit => {
            beta == 1.0 && sigma != 0.0 && sigma != 1.0 && alpha * sigma > 0.0 && 1.0 + 1.0 / sigma > 0.0
        }
        Variant::IncGamma => sigma == 0.0 && interior && alpha != 0.0,
        Variant::IncBeta => sigma == 1.0 && interior && alpha != 0.0,
        Variant::Cara => sigma == 0.0 && beta == 0.0 && alpha > 0.0,
        Variant::Quadratic => sigma == -1.0 && beta == 0.0 && alpha > 0.0,
        Variant::TranslatedLog => sigma == 1.0 && beta == 0.0 && alpha > 0.0,
        Variant::ExpIntegral => sigma == 0.0 && beta == 1.0 && alpha != 0.0,
        Variant::Log => sigma == 1.0 && beta == 1.0,
        Variant::MnpCremr { gamma, beta_tilde, .. } => {
            *gamma > 0.0
                && *beta_tilde > 0.0
                && sigma > 0.0
                && sigma != 1.0
                && beta == 1.0
                && ((alpha * gamma * sigma) + 1.0).abs() <= 1e-12
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::VariantMismatch(format!("variant {} does not apply to α={alpha}, β={beta}, σ={sigma}", v.name())))
    }
}

/// Relative risk aversion `(αq+β)/(ασq+1)`.
///
/// # Errors
///
/// [`Error::Domain`] if `q < 0` or `ασq + 1 ≤ 0`.
pub fn rra(params: &LfrraParams, q: f64) -> Result<f64> {
    let den = rra_denominator(params, q)?;
    Ok((params.alpha * q + params.beta) / den)
}

/// Slope of the RRA in quantity, `α(1−βσ)/(1+ασq)²`.
///
/// # Errors
///
/// As [`rra`].
pub fn rra_derivative(params: &LfrraParams, q: f64) -> Result<f64> {
    let den = rra_denominator(params, q)?;
    Ok(params.alpha * params.one_minus_beta_sigma() / (den * den))
}

fn rra_denominator(params: &LfrraParams, q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::domain(format!("quantity must be non-negative (q={q})")));
    }
    let den = params.alpha * params.sigma * q + 1.0;
    if !(den > 0.0) {
        return Err(Error::domain(format!("1 + ασq = {den} ≤ 0 at q={q}")));
    }
    Ok(den)
}

/// The range of quantities on which utility is strictly increasing and
/// strictly concave, i.e. `1+ασq > 0` and `αq+β > 0`.
///
/// Constant-RRA parameters give `[0, ∞)`. Otherwise `β = 0` requires
/// `α > 0`, and `β = 1` with `σ ≠ 0` requires `ασ > 0` and `1 + 1/σ > 0`.
/// The lower end is open when `β = 1`.
///
/// # Errors
///
/// [`Error::Inadmissible`] when these constraints fail.
pub fn admissible_q_range(params: &LfrraParams) -> Result<QuantityInterval> {
    let LfrraParams { alpha, beta, sigma } = *params;
    let lower_open = beta == 1.0;
    let interval = |upper: f64| QuantityInterval { lower: 0.0, lower_open, upper };
    if params.is_crra() {
        if beta == 0.0 {
            return Err(Error::Inadmissible("α = 0 with β = 0 gives linear utility".into()));
        }
        return Ok(interval(f64::INFINITY));
    }
    if beta == 0.0 && !(alpha > 0.0) {
        return Err(Error::Inadmissible(format!("β = 0 requires α > 0 (α={alpha})")));
    }
    if beta == 1.0 && sigma != 0.0 && !(alpha * sigma > 0.0 && 1.0 + 1.0 / sigma > 0.0) {
        return Err(Error::Inadmissible(format!("β = 1 requires ασ > 0 and 1 + 1/σ > 0 (α={alpha}, σ={sigma})")));
    }
    let a_sigma = alpha * sigma;
    let upper = match (alpha >= 0.0, a_sigma >= 0.0) {
        (true, true) => f64::INFINITY,
        (false, true) => -beta / alpha,
        (true, false) => -1.0 / a_sigma,
        (false, false) => (-1.0 / a_sigma).min(-beta / alpha),
    };
    Ok(interval(upper))
}

/// Admissible quantities for a full spec; the thresholded CREMR variant
/// uses `q > γ·max(1, σ)`.
pub fn spec_q_range(spec: &UtilitySpec) -> Result<QuantityInterval> {
    match spec.variant {
        Variant::MnpCremr { gamma, .. } => {
            Ok(QuantityInterval { lower: gamma * spec.params.sigma.max(1.0), lower_open: true, upper: f64::INFINITY })
        }
        _ => admissible_q_range(&spec.params),
    }
}

fn check_q(spec: &UtilitySpec, q: f64) -> Result<()> {
    let range = spec_q_range(spec)?;
    if !range.contains(q) {
        return Err(Error::domain(format!("q = {q} outside the admissible range [{}, {})", range.lower, range.upper)));
    }
    Ok(())
}

fn has_sigma_zero(spec: &UtilitySpec) -> bool {
    spec.params.sigma == 0.0 && !matches!(spec.variant, Variant::Crra)
}

/// Marginal utility `u′(q) = K(1+ασq)^{β−1/σ} q^{−β}` (with the `σ = 0`
/// limit `K e^{−αq} q^{−β}` and the CRRA form `K q^{−β}`).
///
/// At `q = 0` with `β > 0` the marginal utility diverges and `+∞` is
/// returned.
///
/// # Errors
///
/// [`Error::Domain`] outside the admissible range.
pub fn marginal_utility(spec: &UtilitySpec, q: f64) -> Result<f64> {
    check_q(spec, q)?;
    let LfrraParams { alpha, beta, sigma } = spec.params;
    let k = spec.k_scale;
    if let Variant::MnpCremr { gamma, beta_tilde, .. } = spec.variant {
        return Ok(beta_tilde * ((sigma - 1.0) / sigma * (q - gamma).ln() - q.ln()).exp());
    }
    if q == 0.0 {
        return Ok(if beta > 0.0 { f64::INFINITY } else { k });
    }
    let log_q_part = -beta * q.ln();
    let log_a_part = if matches!(spec.variant, Variant::Crra) {
        0.0
    } else if has_sigma_zero(spec) {
        -alpha * q
    } else {
        (beta - 1.0 / sigma) * (alpha * sigma * q).ln_1p()
    };
    Ok(k * (log_a_part + log_q_part).exp())
}

/// Second derivative `u″(q) = −K(αq+β)(1+ασq)^{−1+β−1/σ} q^{−1−β}`,
/// evaluated from its own closed form (not from `u′`).
///
/// # Errors
///
/// [`Error::Domain`] outside the admissible range.
pub fn marginal_utility_second(spec: &UtilitySpec, q: f64) -> Result<f64> {
    check_q(spec, q)?;
    let LfrraParams { alpha, beta, sigma } = spec.params;
    let k = spec.k_scale;
    if let Variant::MnpCremr { gamma, beta_tilde, .. } = spec.variant {
        let lead = (-(1.0 / sigma) * (q - gamma).ln() - 2.0 * q.ln()).exp();
        return Ok(beta_tilde * lead * (gamma - q / sigma));
    }
    if matches!(spec.variant, Variant::Crra) {
        if q == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        return Ok(-k * beta * (-(1.0 + beta) * q.ln()).exp());
    }
    if q == 0.0 {
        return Ok(if beta > 0.0 { f64::NEG_INFINITY } else { -k * alpha });
    }
    let sigma_zero = has_sigma_zero(spec);
    if beta == 0.0 {
        // The q^{-1} factor cancels against αq.
        let a_part =
            if sigma_zero { (-alpha * q).exp() } else { ((-1.0 - 1.0 / sigma) * (alpha * sigma * q).ln_1p()).exp() };
        return Ok(-k * alpha * a_part);
    }
    let log_a_part = if sigma_zero { -alpha * q } else { (-1.0 + beta - 1.0 / sigma) * (alpha * sigma * q).ln_1p() };
    Ok(-k * (alpha * q + beta) * (log_a_part - (1.0 + beta) * q.ln()).exp())
}

/// How the utility level is evaluated where more than one representation
/// exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Power series inside `|z| ≤ 0.95`, integral form outside.
    Auto,
    /// Hypergeometric power series (fails outside the unit disc).
    Series,
    /// Real integral representation (valid on the whole admissible range).
    Integral,
}

/// Utility level `u(q)` with the automatic choice of representation and
/// default series settings.
///
/// # Errors
///
/// [`Error::Domain`] outside the admissible range; kernel errors are
/// propagated.
pub fn utility(spec: &UtilitySpec, q: f64) -> Result<f64> {
    utility_with(spec, q, Representation::Auto, &SeriesConfig::default())
}

/// Utility level `u(q)` with an explicit representation choice.
///
/// The representation only matters for the general hypergeometric case, the
/// CREMR limit and the thresholded CREMR; every other variant has a single
/// closed or integral form.
pub fn utility_with(spec: &UtilitySpec, q: f64, repr: Representation, cfg: &SeriesConfig) -> Result<f64> {
    check_q(spec, q)?;
    let LfrraParams { alpha, beta, sigma } = spec.params;
    let k = spec.k_scale;
    let c = spec.c_shift;
    let value = match spec.variant {
        Variant::Crra => {
            if beta == 1.0 {
                k * q.ln()
            } else {
                k * q.powf(1.0 - beta) / (1.0 - beta)
            }
        }
        Variant::GeneralHypergeometric => k * general_level(alpha, beta, sigma, q, repr, cfg)?,
        Variant::HaraLimit | Variant::Quadratic => {
            // K/(α(σ−1))·[(1+ασq)^{(σ−1)/σ} − 1]
            let e = (sigma - 1.0) / sigma * (alpha * sigma * q).ln_1p();
            k * e.exp_m1() / (alpha * (sigma - 1.0))
        }
        Variant::CremrLimit => k * cremr_level(alpha, sigma, q, repr, cfg)?,
        Variant::IncGamma => {
            if q == 0.0 {
                0.0
            } else if alpha > 0.0 {
                // K α^{β−1} γ(1−β, αq)
                k * alpha.powf(beta - 1.0) * lower_incomplete_gamma(1.0 - beta, alpha * q)?
            } else {
                let aq = alpha * q;
                k * q.powf(1.0 - beta) * beta_weighted_integral(1.0 - beta, 1.0, |t, _| (-aq * t).exp(), cfg)?
            }
        }
        Variant::IncBeta => {
            if q == 0.0 {
                0.0
            } else {
                let aq = alpha * q;
                let g = |t: f64, _: f64| ((beta - 1.0) * (aq * t).ln_1p()).exp();
                k * q.powf(1.0 - beta) * beta_weighted_integral(1.0 - beta, 1.0, g, cfg)?
            }
        }
        Variant::Cara => -k / alpha * (-alpha * q).exp_m1(),
        Variant::TranslatedLog => k / alpha * (alpha * q).ln_1p(),
        Variant::ExpIntegral => k * exp_integral_ei(-alpha * q)?,
        Variant::Log => k * q.ln(),
        Variant::MnpCremr { gamma, beta_tilde, kappa } => {
            return mnp_level(gamma, beta_tilde, kappa, sigma, q, repr, cfg);
        }
    };
    Ok(value + c)
}

/// `u/K` for the general hypergeometric case, `β ∈ (0,1)`, `σ ∉ {0,1}`.
fn general_level(alpha: f64, beta: f64, sigma: f64, q: f64, repr: Representation, cfg: &SeriesConfig) -> Result<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let z = -alpha * sigma * q;
    let a = 1.0 - 1.0 / sigma;
    let use_series = match repr {
        Representation::Auto => z.abs() <= SERIES_SWITCH,
        Representation::Series => true,
        Representation::Integral => false,
    };
    // F̃ = ₂F₁(a, 1; 2−β; z)/(1−β)
    let f_tilde = if use_series {
        hyp2f1(a, 1.0, 2.0 - beta, z, cfg)? / (1.0 - beta)
    } else {
        beta_weighted_integral(1.0, 1.0 - beta, |t, _| (-a * (-z * t).ln_1p()).exp(), cfg)?
    };
    let prefactor = sigma / (sigma - 1.0) * ((beta - 1.0 / sigma) * (-z).ln_1p() + (1.0 - beta) * q.ln()).exp();
    Ok(prefactor * (1.0 + (beta - 1.0 / sigma) * f_tilde))
}

/// `u/K` for the CREMR limit `β = 1`, `ασ > 0`, `1 + 1/σ > 0`.
fn cremr_level(alpha: f64, sigma: f64, q: f64, repr: Representation, cfg: &SeriesConfig) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::domain("CREMR utility requires q > 0"));
    }
    let asq = alpha * sigma * q;
    let w = 1.0 / asq;
    let use_series = match repr {
        Representation::Auto => w <= SERIES_SWITCH,
        Representation::Series => true,
        Representation::Integral => false,
    };
    let lead = sigma / (sigma - 1.0);
    let ratio = (sigma - 1.0) / (alpha * sigma);
    if use_series {
        let f = hyp2f1(1.0, 1.0, 1.0 + 1.0 / sigma, -w, cfg)?;
        let pow = ((1.0 - 1.0 / sigma) * asq.ln_1p()).exp() / q;
        return Ok(lead * pow * (q - ratio * f));
    }
    if sigma > 0.0 {
        // (1/σ)∫₀¹ (1−t)^{1/σ−1} (1 + t/(ασq))^{−1} dt
        let f = beta_weighted_integral(1.0, 1.0 / sigma, |t, _| 1.0 / (1.0 + t * w), cfg)? / sigma;
        let pow = ((1.0 - 1.0 / sigma) * asq.ln_1p()).exp() / q;
        Ok(lead * pow * (q - ratio * f))
    } else {
        // σ < −1: the integrable weight is (1−t)^{1/σ}.
        let j = beta_weighted_integral(1.0, 1.0 + 1.0 / sigma, |t, _| 1.0 / (1.0 + t * w), cfg)? / sigma;
        let base = 1.0 + asq;
        let pow = ((-1.0 / sigma) * asq.ln_1p()).exp() / q;
        Ok(lead * pow * (base * q - (sigma - 1.0) * q - ratio * j))
    }
}

fn mnp_level(
    gamma: f64,
    beta_tilde: f64,
    kappa: f64,
    sigma: f64,
    q: f64,
    repr: Representation,
    cfg: &SeriesConfig,
) -> Result<f64> {
    let z = gamma / q;
    let use_series = match repr {
        Representation::Auto => z <= SERIES_SWITCH,
        Representation::Series => true,
        Representation::Integral => false,
    };
    let f = if use_series {
        hyp2f1(1.0, 1.0, 1.0 + 1.0 / sigma, z, cfg)?
    } else {
        beta_weighted_integral(1.0, 1.0 / sigma, |_, omt| 1.0 / ((1.0 - z) + z * omt), cfg)? / sigma
    };
    let pow = ((sigma - 1.0) / sigma * (q - gamma).ln()).exp() / q;
    Ok(kappa + beta_tilde * sigma / (sigma - 1.0) * pow * (q + gamma * (sigma - 1.0) * f))
}

/// `|−q u″/u′ − RRA(q)|` from the closed forms of `u′` and `u″`; a direct
/// check that the constructed utility has the prescribed RRA.
///
/// # Errors
///
/// [`Error::Domain`] outside the admissible interior.
pub fn utility_consistency_residual(spec: &UtilitySpec, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::domain("consistency residual requires q > 0"));
    }
    let u1 = marginal_utility(spec, q)?;
    let u2 = marginal_utility_second(spec, q)?;
    let target = match spec.variant {
        Variant::MnpCremr { gamma, .. } => {
            let s = spec.params.sigma;
            (q - gamma * s) / (s * (q - gamma))
        }
        _ => rra(&spec.params, q)?,
    };
    Ok((-q * u2 / u1 - target).abs())
}

/// Quantity demanded at price `p` given the marginal utility of income
/// `ν`: the `q` solving `u′(q) = νp`.
///
/// HARA-type variants use the closed form `q = ((νp/K)^{−σ} − 1)/(ασ)`
/// (CARA: `−ln(νp/K)/α`); every other variant inverts the strictly
/// decreasing `u′` by bracketed root finding on the admissible range.
///
/// # Errors
///
/// [`Error::NoSolution`] when `νp` lies outside the range of `u′`.
pub fn demand(spec: &UtilitySpec, nu: f64, p: f64) -> Result<f64> {
    if !(nu > 0.0 && p > 0.0 && nu.is_finite() && p.is_finite()) {
        return Err(Error::domain(format!("ν and p must be positive (ν={nu}, p={p})")));
    }
    let range = spec_q_range(spec)?;
    let target = nu * p;
    let LfrraParams { alpha, sigma, .. } = spec.params;
    let k = spec.k_scale;
    let closed = match spec.variant {
        Variant::Cara => Some(-(target / k).ln() / alpha),
        Variant::HaraLimit | Variant::Quadratic | Variant::TranslatedLog => {
            Some(((-sigma * (target / k).ln()).exp_m1()) / (alpha * sigma))
        }
        _ => None,
    };
    if let Some(q) = closed {
        if range.contains(q) && q.is_finite() {
            return Ok(q);
        }
        return Err(Error::NoSolution(format!("price {p} outside the range of u′/ν")));
    }
    let ln_target = target.ln();
    let g = |q: f64| -> f64 {
        match marginal_utility(spec, q) {
            Ok(v) => v.ln() - ln_target,
            Err(_) => f64::NAN,
        }
    };
    let (lo, hi) = bracket_decreasing(&g, &range)
        .ok_or_else(|| Error::NoSolution(format!("price {p} outside the range of u′/ν")))?;
    brent_root(g, lo, hi, 1e-15 * hi.abs().max(1e-300))
}

/// Finds `lo < hi` in the interval with `g(lo) > 0 > g(hi)` for a
/// decreasing `g`.
fn bracket_decreasing<G: Fn(f64) -> f64>(g: &G, range: &QuantityInterval) -> Option<(f64, f64)> {
    let lower = range.lower;
    let upper = range.upper;
    let start = if upper.is_finite() {
        lower + 0.5 * (upper - lower)
    } else if lower > 0.0 {
        2.0 * lower
    } else {
        1.0
    };
    let g0 = g(start);
    if g0.is_nan() {
        return None;
    }
    if g0 == 0.0 {
        return Some((start, start));
    }
    let mut cur = start;
    if g0 > 0.0 {
        // Move towards the upper end.
        for _ in 0..4000 {
            let next = if upper.is_finite() { cur + 0.5 * (upper - cur) } else { 2.0 * cur };
            if next == cur || !next.is_finite() {
                return None;
            }
            let v = g(next);
            if v.is_nan() {
                return None;
            }
            if v <= 0.0 {
                return Some((cur, next));
            }
            cur = next;
        }
    } else {
        for _ in 0..4000 {
            let next = lower + 0.5 * (cur - lower);
            if next == cur || next <= lower {
                return None;
            }
            let v = g(next);
            if v.is_nan() {
                return None;
            }
            if v >= 0.0 {
                return Some((next, cur));
            }
            cur = next;
        }
    }
    None
}
