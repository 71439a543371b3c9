//! CSV process logs and their summaries.
//!
//! A log starts with a `# schema: …` comment line, then a header row, then
//! one row per sample ordered by time and then by material point. Floats are
//! written with 17 significant digits so a log reproduces the samples bit
//! for bit.

use std::fmt;
use std::io::{BufRead, Write};

use crate::constitutive::Constitutive;
use crate::error::Result;
use crate::process::ProcessSample;
use crate::verification::{dissipation_residual_spatial, internal_dissipation, scaled_residual};

pub const SCHEMA: &str = "electroelastic-process-log/1";

pub const COLUMNS: [&str; 16] = [
    "t", "X1", "X2", "X3", "theta", "det_f", "psi", "eta", "delta0", "delta0_rel", "dissipation", "b1", "b2",
    "b3", "r", "q_dot_g",
];

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed log: {0}")]
    Malformed(String),
}

/// One log row, in [`COLUMNS`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRow(pub [f64; 16]);

impl LogRow {
    pub fn from_sample<M: Constitutive>(m: &M, s: &ProcessSample) -> Result<Self> {
        let (d0, scale) = internal_dissipation(s);
        let dissipation = dissipation_residual_spatial(m, &s.state, &s.rates)?;
        Ok(LogRow([
            s.t,
            s.x[0],
            s.x[1],
            s.x[2],
            s.state.theta,
            s.state.jacobian(),
            s.response.psi,
            s.response.eta,
            d0,
            scaled_residual(d0, scale),
            dissipation,
            s.b[0],
            s.b[1],
            s.b[2],
            s.r,
            s.response.q.dot(&s.state.g),
        ]))
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        COLUMNS.iter().position(|c| *c == column).map(|k| self.0[k])
    }
}

pub fn write_log<W: Write>(mut out: W, rows: &[LogRow]) -> std::result::Result<(), LogError> {
    writeln!(out, "# schema: {SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.0.iter().map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> LogError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => LogError::Io(e),
        other => LogError::Malformed(format!("{other:?}")),
    }
}

pub fn read_log<R: BufRead>(mut input: R) -> std::result::Result<Vec<LogRow>, LogError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let schema = first.trim_end().strip_prefix("# schema: ");
    if schema != Some(SCHEMA) {
        return Err(LogError::Malformed(format!("expected `# schema: {SCHEMA}` on line 1")));
    }
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| LogError::Malformed(e.to_string()))?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(LogError::Malformed(format!("header must be `{}`", COLUMNS.join(","))));
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let line = k + 3;
        let rec = rec.map_err(|e| LogError::Malformed(format!("line {line}: {e}")))?;
        let mut row = [0.0; 16];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| LogError::Malformed(format!("line {line}: `{field}` is not a number")))?;
        }
        rows.push(LogRow(row));
    }
    if rows.is_empty() {
        return Err(LogError::Malformed("no data rows".into()));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStats {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogSummary {
    pub rows: usize,
    pub columns: Vec<ColumnStats>,
    pub max_abs_delta0: f64,
    pub max_delta0_rel: f64,
    pub max_abs_dissipation: f64,
    pub max_dissipation: f64,
}

pub fn summarize(rows: &[LogRow]) -> LogSummary {
    let columns = COLUMNS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let vals = rows.iter().map(|r| r.0[k]);
            ColumnStats {
                name,
                min: vals.clone().fold(f64::INFINITY, f64::min),
                max: vals.clone().fold(f64::NEG_INFINITY, f64::max),
                mean: vals.sum::<f64>() / rows.len() as f64,
            }
        })
        .collect();
    let col = |name: &str| COLUMNS.iter().position(|c| *c == name).unwrap_or(0);
    let max_of = |k: usize, f: fn(f64) -> f64| rows.iter().map(|r| f(r.0[k])).fold(0.0_f64, f64::max);
    LogSummary {
        rows: rows.len(),
        columns,
        max_abs_delta0: max_of(col("delta0"), f64::abs),
        max_delta0_rel: max_of(col("delta0_rel"), f64::abs),
        max_abs_dissipation: max_of(col("dissipation"), f64::abs),
        max_dissipation: rows.iter().map(|r| r.0[col("dissipation")]).fold(f64::NEG_INFINITY, f64::max),
    }
}

impl fmt::Display for LogSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        writeln!(f, "{:<12} {:>24} {:>24} {:>24}", "column", "min", "max", "mean")?;
        for c in &self.columns {
            writeln!(f, "{:<12} {:>24.16e} {:>24.16e} {:>24.16e}", c.name, c.min, c.max, c.mean)?;
        }
        writeln!(f, "max |delta0|          = {:.6e}", self.max_abs_delta0)?;
        writeln!(f, "max |delta0| (scaled) = {:.6e}", self.max_delta0_rel)?;
        writeln!(f, "max |dissipation|     = {:.6e}", self.max_abs_dissipation)?;
        write!(f, "max dissipation       = {:.6e}", self.max_dissipation)
    }
}
