//! Firm-level observations, filtering, per-sector trimming and quantity
//! scaling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One parsed input row; missing values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawObservation {
    /// Sector identifier.
    pub sector_id: i64,
    /// Opaque firm identifier.
    pub firm_id: String,
    /// Year of observation.
    pub year: i64,
    /// Markup `1/μ`, if present.
    pub markup: Option<f64>,
    /// Quantity, if present.
    pub quantity: Option<f64>,
}

/// A clean observation: markup above one and positive quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmObservation {
    /// Sector identifier.
    pub sector_id: i64,
    /// Opaque firm identifier.
    pub firm_id: String,
    /// Year of observation.
    pub year: i64,
    /// Markup `1/μ > 1`.
    pub markup: f64,
    /// Quantity `q > 0` (scaled by the sample mean after preparation).
    pub quantity: f64,
}

impl FirmObservation {
    /// The observed `1 − μ = 1 − 1/markup`, the left-hand side of the
    /// estimating equation.
    pub fn one_minus_mu(&self) -> f64 {
        1.0 - 1.0 / self.markup
    }
}

/// Observations ready for estimation: filtered, trimmed and with
/// quantities divided by their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedData {
    /// Retained observations with scaled quantities.
    pub observations: Vec<FirmObservation>,
    /// Mean raw quantity used for scaling.
    pub quantity_scale: f64,
    /// Smallest scaled quantity.
    pub q_min: f64,
    /// Largest scaled quantity.
    pub q_max: f64,
}

impl PreparedData {
    /// Wraps observations whose quantities are already on the estimation
    /// scale (used for bootstrap resamples).
    pub fn from_scaled(observations: Vec<FirmObservation>, quantity_scale: f64) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Empty("no observations".into()));
        }
        let (q_min, q_max) = observations
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o.quantity), hi.max(o.quantity)));
        Ok(Self { observations, quantity_scale, q_min, q_max })
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    /// Whether no observations are present.
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Quantities and `1 − μ` values as parallel vectors.
    pub fn columns(&self) -> (Vec<f64>, Vec<f64>) {
        self.observations.iter().map(|o| (o.quantity, o.one_minus_mu())).unzip()
    }
}

/// Retention bounds `[v_(k+1), v_(n−k)]` with `k = ⌊p·n⌋` (order statistics,
/// 1-based). Values equal to a bound are kept, so ties never split.
fn trim_bounds(values: &mut [f64], fraction: f64) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let k = (fraction * n as f64 + 1e-9).floor() as usize;
    if 2 * k >= n {
        return (f64::INFINITY, f64::NEG_INFINITY);
    }
    (values[k], values[n - k - 1])
}

/// Filters, trims and scales raw rows.
///
/// Rows with a missing or non-finite markup or quantity, a markup `≤ 1` or
/// a quantity `≤ 0` are dropped. Within each sector the bottom and top
/// `trim_fraction` of the markup distribution and, independently, of the
/// quantity distribution are removed (the union of both is dropped), using
/// the order-statistic bounds `[v_(k+1), v_(n−k)]` with `k = ⌊p·n⌋`.
/// Quantities are then divided by the mean of the retained quantities.
///
/// # Errors
///
/// [`Error::Config`] for a trim fraction outside `[0, 0.5)`, and
/// [`Error::Empty`] when nothing survives.
pub fn prepare_data(rows: &[RawObservation], trim_fraction: f64) -> Result<PreparedData> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::Config(format!("trim fraction must lie in [0, 0.5) (got {trim_fraction})")));
    }
    let clean: Vec<FirmObservation> = rows
        .iter()
        .filter_map(|r| match (r.markup, r.quantity) {
            (Some(m), Some(q)) if m.is_finite() && q.is_finite() && m > 1.0 && q > 0.0 => Some(FirmObservation {
                sector_id: r.sector_id,
                firm_id: r.firm_id.clone(),
                year: r.year,
                markup: m,
                quantity: q,
            }),
            _ => None,
        })
        .collect();
    if clean.is_empty() {
        return Err(Error::Empty("no row has a markup above one and a positive quantity".into()));
    }
    type MarkupAndQuantityBounds = ((f64, f64), (f64, f64));
    let mut bounds: BTreeMap<i64, MarkupAndQuantityBounds> = BTreeMap::new();
    let mut by_sector: BTreeMap<i64, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for o in &clean {
        let e = by_sector.entry(o.sector_id).or_default();
        e.0.push(o.markup);
        e.1.push(o.quantity);
    }
    for (sector, (mut markups, mut quantities)) in by_sector {
        let mb = trim_bounds(&mut markups, trim_fraction);
        let qb = trim_bounds(&mut quantities, trim_fraction);
        bounds.insert(sector, (mb, qb));
    }
    let kept: Vec<FirmObservation> = clean
        .into_iter()
        .filter(|o| {
            let ((m_lo, m_hi), (q_lo, q_hi)) = bounds[&o.sector_id];
            o.markup >= m_lo && o.markup <= m_hi && o.quantity >= q_lo && o.quantity <= q_hi
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::Empty("trimming removed every observation".into()));
    }
    let scale = kept.iter().map(|o| o.quantity).sum::<f64>() / kept.len() as f64;
    let scaled = kept.into_iter().map(|o| FirmObservation { quantity: o.quantity / scale, ..o }).collect();
    PreparedData::from_scaled(scaled, scale)
}
