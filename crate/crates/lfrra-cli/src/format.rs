//! Numeric rendering and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Rounds to 15 significant digits.
pub fn round15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Renders a number with 15 significant digits in its shortest form:
/// positional notation for magnitudes in `[1e−5, 1e15)`, exponent notation
/// otherwise.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round15(v);
    let a = r.abs();
    if r == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Rounds every number of a JSON document to 15 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(Value::Null, |f| serde_json::json!(round15(f))),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Provenance record emitted with every output.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    /// Command name.
    pub command: String,
    /// Echo of the effective arguments.
    pub config: Value,
    /// Random seed, for commands that use one.
    pub seed: Option<u64>,
    /// SHA-256 of the input file, for commands that read one.
    pub input_digest: Option<String>,
    /// Library version.
    pub version: String,
    /// Wall-clock run time in seconds.
    pub wall_time_seconds: f64,
}

impl Manifest {
    /// Builds a manifest from serialisable arguments.
    pub fn new<A: Serialize>(
        command: &str,
        args: &A,
        seed: Option<u64>,
        input_digest: Option<String>,
        wall: f64,
    ) -> Self {
        Self {
            command: command.into(),
            config: serde_json::to_value(args).unwrap_or(Value::Null),
            seed,
            input_digest,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds: wall,
        }
    }
}

/// Opens the output: the given file or standard output.
pub fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Sidecar path `<out>.manifest.json` for tabular outputs.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Emits the manifest of a CSV command: next to the output file, or on
/// standard error when writing to standard output.
pub fn emit_manifest(manifest: &Manifest, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&round_json(serde_json::to_value(manifest)?))?;
    match out {
        Some(p) => std::fs::write(sidecar(p), text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}
