//! Shared fixtures for the criterion benchmarks in `benches/`.

use lfrra::estimator::{prepare_data, synth_generate};
use lfrra::{LfrraParams, PreparedData, RawObservation};

/// Parameter triple used throughout the benchmarks: an IRRA economy with
/// `β ∈ (0,1)` and `βσ < 1`.
pub fn bench_params() -> LfrraParams {
    LfrraParams::new(20.0, 0.3, 2.9).expect("admissible benchmark parameters")
}

/// A prepared synthetic sample of `n` firms with noise `sd` on `1 − μ`.
pub fn bench_data(n: usize, sd: f64) -> PreparedData {
    let rows = synth_generate(&bench_params(), n, sd, 1).expect("synthetic sample");
    let raw: Vec<RawObservation> = rows
        .into_iter()
        .map(|o| RawObservation {
            sector_id: o.sector_id,
            firm_id: o.firm_id,
            year: o.year,
            markup: Some(o.markup),
            quantity: Some(o.quantity),
        })
        .collect();
    prepare_data(&raw, 0.03).expect("prepared sample")
}
