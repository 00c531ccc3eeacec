//! Command implementations.

use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context};
use lfrra::estimator::{
    attach_bootstrap, bootstrap, fit_klenow_willis, fit_specification, prepare_data, synth_generate_with,
    EstimationConfig, PreparedData, SynthConfig,
};
use lfrra::markup::{equilibrium_curve, solve_markup, x_domain};
use lfrra::utility::{marginal_utility, marginal_utility_second, rra, spec_q_range, utility};
use lfrra::{Error, LfrraParams, Specification, UtilitySpec};
use serde_json::{json, Map, Value};

use crate::args::{CompareArgs, CurveArgs, EstimateArgs, EvalArgs, FitArgs, MarkupArgs, ParamArgs, SynthArgs};
use crate::dataset::{read_dataset, write_dataset};
use crate::format::{emit_manifest, fmt_num, open_output, round_json, Manifest};

/// Relative tolerance of the markup solver.
const MARKUP_TOL: f64 = 1e-14;

fn params(p: &ParamArgs) -> anyhow::Result<LfrraParams> {
    Ok(LfrraParams::new(p.alpha, p.beta, p.sigma)?)
}

fn flag(ok: bool) -> String {
    if ok { "true" } else { "false" }.into()
}

/// `eval`: one CSV row `(q, u, u′, u″, rra, status)` per quantity; rows
/// outside the admissible range are flagged `out_of_range`.
pub fn eval(args: &EvalArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let spec = UtilitySpec::natural(params(&args.params)?, args.k, args.c)?;
    let range = spec_q_range(&spec)?;
    let mut w = csv::Writer::from_writer(open_output(args.out.as_deref())?);
    w.write_record(["q", "u", "u_prime", "u_second", "rra", "status"])?;
    for &q in &args.q {
        let values = if range.contains(q) {
            (|| -> lfrra::Result<[f64; 4]> {
                Ok([
                    utility(&spec, q)?,
                    marginal_utility(&spec, q)?,
                    marginal_utility_second(&spec, q)?,
                    rra(&spec.params, q)?,
                ])
            })()
        } else {
            Err(Error::Domain("out of range".into()))
        };
        let mut record = vec![fmt_num(q)];
        match values {
            Ok(v) => {
                record.extend(v.iter().map(|&x| fmt_num(x)));
                record.push("ok".into());
            }
            Err(Error::Domain(_)) => {
                record.extend(std::iter::repeat_n(String::new(), 4));
                record.push("out_of_range".into());
            }
            Err(e) => {
                record.extend(std::iter::repeat_n(String::new(), 4));
                record.push(format!("error: {e}"));
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    let manifest = Manifest::new("eval", args, None, None, start.elapsed().as_secs_f64());
    emit_manifest(&manifest, args.out.as_deref())
}

/// `markup`: one CSV row `(x, mu, markup, q, case, soc_ok, status)` per
/// cost; costs outside the domain are flagged `out_of_domain`.
pub fn markup(args: &MarkupArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let p = params(&args.params)?;
    let domain = x_domain(&p)?;
    let mut w = csv::Writer::from_writer(open_output(args.out.as_deref())?);
    w.write_record(["x", "mu", "markup", "q", "case", "soc_ok", "status"])?;
    for &x in &args.x {
        let mut record = vec![fmt_num(x)];
        match solve_markup(&p, x, MARKUP_TOL) {
            Ok(s) => {
                record.extend([fmt_num(s.mu), fmt_num(s.markup), fmt_num(s.q), s.case.name().into(), flag(s.soc_ok)]);
                record.push("ok".into());
            }
            Err(e) => {
                record.extend(std::iter::repeat_n(String::new(), 5));
                record.push(if domain.contains(x) { format!("error: {e}") } else { "out_of_domain".into() });
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    let manifest = Manifest::new("markup", args, None, None, start.elapsed().as_secs_f64());
    emit_manifest(&manifest, args.out.as_deref())
}

/// `curve`: long-format CSV `(m, x, mu, price, q, soc_ok, in_domain)`.
pub fn curve(args: &CurveArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let rows = equilibrium_curve(&params(&args.params)?, args.nu, args.k, &args.m)?;
    let mut w = csv::Writer::from_writer(open_output(args.out.as_deref())?);
    w.write_record(["m", "x", "mu", "price", "q", "soc_ok", "in_domain"])?;
    for r in rows {
        let num = |v: f64| if r.in_domain { fmt_num(v) } else { String::new() };
        w.write_record([
            fmt_num(r.m),
            fmt_num(r.x),
            num(r.mu),
            num(r.price),
            num(r.q),
            flag(r.soc_ok),
            flag(r.in_domain),
        ])?;
    }
    w.flush()?;
    let manifest = Manifest::new("curve", args, None, None, start.elapsed().as_secs_f64());
    emit_manifest(&manifest, args.out.as_deref())
}

/// `synth`: writes a dataset CSV and its manifest sidecar.
pub fn synth(args: &SynthArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let cfg = SynthConfig { log_sd: args.log_sd, sector_id: args.sector };
    let rows = synth_generate_with(&params(&args.params)?, args.n, args.noise, args.seed, &cfg)?;
    let file = std::fs::File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_dataset(&rows, std::io::BufWriter::new(file))?;
    let manifest = Manifest::new("synth", args, Some(args.seed), None, start.elapsed().as_secs_f64());
    emit_manifest(&manifest, Some(&args.out))
}

/// Reads, filters by sector and prepares the data of a fitting command.
fn load(fit: &FitArgs) -> anyhow::Result<(PreparedData, String)> {
    let dataset = read_dataset(&fit.input)?;
    let rows = if fit.sector.eq_ignore_ascii_case("all") {
        dataset.rows
    } else {
        let id: i64 = fit
            .sector
            .parse()
            .with_context(|| format!("--sector must be an integer or 'all' (got '{}')", fit.sector))?;
        dataset.rows.into_iter().filter(|r| r.sector_id == id).collect()
    };
    if rows.is_empty() {
        return Err(Error::Empty(format!("no rows for sector '{}'", fit.sector)).into());
    }
    Ok((prepare_data(&rows, fit.trim)?, dataset.digest))
}

fn config(fit: &FitArgs) -> EstimationConfig {
    EstimationConfig {
        grid_steps: fit.grid_steps,
        expansion_factor: fit.xi,
        max_iterations: fit.max_iterations,
        trim_fraction: fit.trim,
        ..EstimationConfig::default()
    }
}

/// Runs `f` on a pool of `threads` workers (0: all cores).
fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

fn write_json(doc: Value, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let mut w = open_output(out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&round_json(doc))?)?;
    w.flush()?;
    Ok(())
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// `estimate`: JSON result with derived statistics, optional bootstrap
/// block and manifest.
pub fn estimate(args: &EstimateArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let (data, digest) = load(&args.fit)?;
    let spec = Specification::from(args.spec);
    let cfg = EstimationConfig {
        bootstrap_reps: args.bootstrap,
        bootstrap_grid_steps: args.bootstrap_grid_steps,
        seed: args.seed,
        ..config(&args.fit)
    };
    let mut doc = in_pool(args.fit.threads, || -> anyhow::Result<Map<String, Value>> {
        if spec == Specification::Kw {
            if args.bootstrap > 0 {
                bail!(Error::Config("bootstrap is available for the LFRRA family only".into()));
            }
            let mut doc = object(serde_json::to_value(fit_klenow_willis(&data, &cfg)?)?);
            doc.insert("spec".into(), json!("kw"));
            return Ok(doc);
        }
        let mut result = fit_specification(&data, &cfg, spec, cfg.grid_steps)?;
        let mut block = Value::Null;
        if args.bootstrap > 0 {
            let outcome = bootstrap(&data, &cfg, spec)?;
            attach_bootstrap(&mut result, &outcome);
            block = json!({
                "reps": args.bootstrap,
                "seed": args.seed,
                "grid_steps": args.bootstrap_grid_steps,
                "skipped": outcome.skipped,
                "replicates": outcome.replicates,
            });
        }
        let mut doc = object(serde_json::to_value(&result)?);
        doc.insert("bootstrap".into(), block);
        Ok(doc)
    })??;
    doc.insert("sector".into(), json!(args.fit.sector));
    let manifest = Manifest::new("estimate", args, Some(args.seed), Some(digest), start.elapsed().as_secs_f64());
    doc.insert("manifest".into(), serde_json::to_value(manifest)?);
    write_json(Value::Object(doc), args.fit.out.as_deref())
}

/// `compare`: fits lfrra, beta0, beta1, mnp and kw on the same data and
/// checks that the unrestricted RSS is no larger than either pinned-β RSS.
pub fn compare(args: &CompareArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let (data, digest) = load(&args.fit)?;
    let cfg = config(&args.fit);
    let rows = in_pool(args.fit.threads, || -> anyhow::Result<Vec<Value>> {
        Specification::COMPARISON_ORDER
            .iter()
            .map(|&spec| -> anyhow::Result<Value> {
                Ok(match spec {
                    Specification::Kw => {
                        let k = fit_klenow_willis(&data, &cfg)?;
                        json!({"spec": "kw", "rss": k.rss, "epsilon": k.epsilon, "sigma_bar": k.sigma_bar, "n_obs": k.n_obs})
                    }
                    _ => {
                        let r = fit_specification(&data, &cfg, spec, cfg.grid_steps)?;
                        json!({
                            "spec": spec.name(),
                            "rss": r.rss,
                            "alpha_hat": r.alpha_hat,
                            "beta_hat": r.beta_hat,
                            "sigma_hat": r.sigma_hat,
                            "beta_minus_inv_sigma": r.beta_minus_inv_sigma,
                            "alpha_times_1_minus_beta_sigma": r.alpha_times_1_minus_beta_sigma,
                            "soc_all_ok": r.soc_all_ok,
                            "n_obs": r.n_obs,
                            "mnp": r.mnp,
                        })
                    }
                })
            })
            .collect()
    })??;
    let rss_of = |i: usize| rows[i]["rss"].as_f64().unwrap_or(f64::INFINITY);
    let nesting_holds = rss_of(0) <= rss_of(1) && rss_of(0) <= rss_of(2);
    if !nesting_holds {
        bail!("nesting violated: unrestricted rss {} exceeds a pinned-β rss ({}, {})", rss_of(0), rss_of(1), rss_of(2));
    }
    let manifest = Manifest::new("compare", args, None, Some(digest), start.elapsed().as_secs_f64());
    let doc = json!({
        "sector": args.fit.sector,
        "rows": rows,
        "nesting_holds": nesting_holds,
        "manifest": manifest,
    });
    write_json(doc, args.fit.out.as_deref())
}
