//! Reading and writing firm datasets.
//!
//! Columns are matched by header name, case-insensitively and in any order:
//! `sector_id` and `year` (integers), `firm_id` (string), `markup` and
//! `quantity` (decimals; an empty field is a missing value).

use std::fmt;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use lfrra::{FirmObservation, RawObservation};
use sha2::{Digest, Sha256};

use crate::format::fmt_num;

/// Required columns in output order.
pub const COLUMNS: [&str; 5] = ["sector_id", "firm_id", "year", "markup", "quantity"];

/// Most row diagnostics listed in one error.
const MAX_DIAGNOSTICS: usize = 20;

/// The input violates the dataset schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema violation: {}", self.0)
    }
}

impl std::error::Error for SchemaError {}

/// A parsed dataset with the SHA-256 digest of the raw file.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Parsed rows.
    pub rows: Vec<RawObservation>,
    /// Lower-case hex SHA-256 of the file bytes.
    pub digest: String,
}

/// Lower-case hex encoding.
pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads and validates a dataset file.
///
/// Rows whose fields fail to parse are reported with their line numbers in
/// a single [`SchemaError`].
pub fn read_dataset(path: &Path) -> anyhow::Result<Dataset> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let digest = hex(&Sha256::digest(&bytes));
    let rows = parse_dataset(&bytes)?;
    Ok(Dataset { rows, digest })
}

/// Parses dataset bytes; see [`read_dataset`].
pub fn parse_dataset(bytes: &[u8]) -> Result<Vec<RawObservation>, SchemaError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let headers = reader.headers().map_err(|e| SchemaError(format!("cannot read header row: {e}")))?.clone();
    let mut index = [0usize; 5];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| SchemaError(format!("missing required column '{name}'")))?;
    }
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("{e}"));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(index[k]).unwrap_or("").trim();
        let mut row_problems = Vec::new();
        let integer = |k: usize, problems: &mut Vec<String>| match field(k).parse::<i64>() {
            Ok(v) => Some(v),
            Err(_) => {
                problems.push(format!("line {line}: {}: expected an integer, found '{}'", COLUMNS[k], field(k)));
                None
            }
        };
        let decimal = |k: usize, problems: &mut Vec<String>| {
            let s = field(k);
            if s.is_empty() {
                return Some(None);
            }
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(Some(v)),
                _ => {
                    problems.push(format!("line {line}: {}: expected a decimal, found '{s}'", COLUMNS[k]));
                    None
                }
            }
        };
        let sector_id = integer(0, &mut row_problems);
        let year = integer(2, &mut row_problems);
        let markup = decimal(3, &mut row_problems);
        let quantity = decimal(4, &mut row_problems);
        if field(1).is_empty() {
            row_problems.push(format!("line {line}: firm_id: empty identifier"));
        }
        match (sector_id, year, markup, quantity) {
            (Some(sector_id), Some(year), Some(markup), Some(quantity)) if row_problems.is_empty() => {
                rows.push(RawObservation { sector_id, firm_id: field(1).to_string(), year, markup, quantity });
            }
            _ => problems.extend(row_problems),
        }
    }
    if problems.is_empty() {
        Ok(rows)
    } else {
        let total = problems.len();
        let mut msg = problems.into_iter().take(MAX_DIAGNOSTICS).collect::<Vec<_>>().join("; ");
        if total > MAX_DIAGNOSTICS {
            msg.push_str(&format!("; … {} more", total - MAX_DIAGNOSTICS));
        }
        Err(SchemaError(msg))
    }
}

/// Writes observations in the dataset schema.
pub fn write_dataset<W: Write>(rows: &[FirmObservation], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.sector_id.to_string(),
            r.firm_id.clone(),
            r.year.to_string(),
            fmt_num(r.markup),
            fmt_num(r.quantity),
        ])?;
    }
    w.flush()?;
    Ok(())
}
