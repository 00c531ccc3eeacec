//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lfrra::Specification;
use serde::Serialize;

/// Utility evaluation, markup solving, equilibrium curves and estimation
/// for linear fractional RRA preferences.
#[derive(Debug, Parser)]
#[command(name = "lfrra", version, about)]
pub struct Cli {
    /// Command to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Available commands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate u, u′, u″ and RRA at a list of quantities (CSV).
    Eval(EvalArgs),
    /// Solve the equilibrium markup at a list of normalised costs (CSV).
    Markup(MarkupArgs),
    /// Trace prices, markups and quantities along marginal costs (CSV).
    Curve(CurveArgs),
    /// Estimate a specification from a firm dataset (JSON).
    Estimate(EstimateArgs),
    /// Write a synthetic firm dataset (CSV).
    Synth(SynthArgs),
    /// Fit every specification on the same data and compare RSS (JSON).
    Compare(CompareArgs),
}

/// The parameter triple.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    /// α, slope of the RRA numerator.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// β ∈ [0, 1], the RRA at zero quantity.
    #[arg(long)]
    pub beta: f64,
    /// σ, ratio of the denominator to the numerator slope.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
}

/// Arguments of `eval`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Utility scale K > 0.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Utility shift C.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Comma-separated quantities.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub q: Vec<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `markup`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct MarkupArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Comma-separated normalised marginal costs x = νm/K.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `curve`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Consumer multiplier ν > 0.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Utility scale K > 0.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Comma-separated marginal costs.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub m: Vec<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Specification selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecArg {
    /// Unrestricted (α, β, σ).
    Lfrra,
    /// β = 0.
    Beta0,
    /// β = 1.
    Beta1,
    /// Translated CREMR, α = −1/(γσ), β = 1.
    Mnp,
    /// Klenow–Willis power-law RRA.
    Kw,
    /// Unrestricted, read under implicit additivity.
    Implicit,
}

impl From<SpecArg> for Specification {
    fn from(s: SpecArg) -> Self {
        match s {
            SpecArg::Lfrra => Specification::Lfrra,
            SpecArg::Beta0 => Specification::Beta0,
            SpecArg::Beta1 => Specification::Beta1,
            SpecArg::Mnp => Specification::Mnp,
            SpecArg::Kw => Specification::Kw,
            SpecArg::Implicit => Specification::Implicit,
        }
    }
}

/// Data selection and search settings shared by `estimate` and `compare`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Input CSV with columns sector_id, firm_id, year, markup, quantity.
    pub input: PathBuf,
    /// Sector to fit, or `all` for a pooled fit.
    #[arg(long, default_value = "all")]
    pub sector: String,
    /// Fraction trimmed from each tail of markups and quantities, per sector.
    #[arg(long, default_value_t = 0.03)]
    pub trim: f64,
    /// Grid points per outer iteration.
    #[arg(long, default_value_t = 100)]
    pub grid_steps: usize,
    /// Expansion factor ξ > 1 when the grid argmin hits an end.
    #[arg(long, default_value_t = 2.0)]
    pub xi: f64,
    /// Outer iterations before reporting non-convergence.
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    /// Worker threads (0: all cores, 1: serial).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `estimate`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// Specification to fit.
    #[arg(long, value_enum, default_value_t = SpecArg::Lfrra)]
    pub spec: SpecArg,
    /// Bootstrap replicates (0: none).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    /// Grid points per outer iteration inside bootstrap replicates.
    #[arg(long, default_value_t = 50)]
    pub bootstrap_grid_steps: usize,
    /// Bootstrap seed.
    #[arg(long, env = "LFRRA_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// Arguments of `compare`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
}

/// Arguments of `synth`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Number of rows.
    #[arg(long)]
    pub n: usize,
    /// Standard deviation of the Gaussian noise on 1 − μ.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Random seed.
    #[arg(long, env = "LFRRA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of log quantity (mean quantity is one).
    #[arg(long, default_value_t = 2.0)]
    pub log_sd: f64,
    /// Sector identifier written to every row.
    #[arg(long, default_value_t = 1)]
    pub sector: i64,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}
