//! `lfrra`: command-line front end for utility evaluation, markup solving,
//! equilibrium curves, synthetic data, estimation and specification
//! comparison.
//!
//! Exit codes: 0 success, 2 schema violation in the input, 3 no
//! observations after filtering, 4 estimation did not converge, 1 any other
//! failure.

mod args;
mod commands;
mod dataset;
mod format;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use dataset::SchemaError;

/// Maps an error to its documented exit code.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<SchemaError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<lfrra::Error>() {
        Some(lfrra::Error::Empty(_)) => 3,
        Some(lfrra::Error::NonConvergence(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Markup(a) => commands::markup(a),
        Command::Curve(a) => commands::curve(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Synth(a) => commands::synth(a),
        Command::Compare(a) => commands::compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
