//! Machine-readable outputs and their schema checks.
//!
//! Every output type rejects unknown fields, so a file validates only if it
//! deserializes into the typed form and serializes back to the same document.

use std::path::Path;

use l0screen::FixState;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    /// Arguments as given on the command line, after the program name.
    pub args: Vec<String>,
    pub version: String,
    pub seed: Option<u64>,
    pub instance: InstanceInfo,
    pub problem: ProblemInfo,
    pub timings_ms: Timings,
    pub screen: Option<ScreenSummary>,
    pub solve: Option<SolveSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceInfo {
    pub m: usize,
    pub n: usize,
    pub a_path: String,
    pub y_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInfo {
    pub variant: String,
    pub gamma: f64,
    pub mu: Option<f64>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub relax: f64,
    pub heuristic: f64,
    pub screen: f64,
    pub solve: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSummary {
    pub n_zero: usize,
    pub n_one: usize,
    pub n_free: usize,
    /// Certified lower bound `L`.
    pub lower_bound: f64,
    /// Upper bound `ζ̄` the rules were applied with.
    pub zeta_bar: f64,
    pub fixes: Vec<FixState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSummary {
    pub method: String,
    pub screen: bool,
    pub objective: f64,
    pub support: Vec<usize>,
    pub x: Vec<f64>,
    pub nodes: usize,
    pub wall_time_s: f64,
    pub optimal: bool,
    pub root_fixed: usize,
    pub root_lower_bound: Option<f64>,
}

/// Header of the bench CSV, in column order.
pub const BENCH_COLUMNS: [&str; 12] = [
    "instance_id",
    "method",
    "k",
    "gamma_exp",
    "rho",
    "snr",
    "fixed_count",
    "fixed_pct",
    "nodes",
    "time_s",
    "optimal",
    "status",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub method: String,
    pub k: usize,
    pub gamma_exp: i32,
    /// Empty for file-based instances.
    pub rho: Option<f64>,
    pub snr: Option<f64>,
    pub fixed_count: usize,
    pub fixed_pct: f64,
    pub nodes: usize,
    pub time_s: f64,
    pub optimal: bool,
    /// `ok`, or `error: <message>` when the run failed.
    pub status: String,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are plain data")
    }

    /// Checks value-level invariants that the types alone do not express.
    pub fn check(&self) -> Result<(), CliError> {
        let t = &self.timings_ms;
        for (name, v) in [("relax", t.relax), ("heuristic", t.heuristic), ("screen", t.screen), ("solve", t.solve)] {
            if !(v >= 0.0) {
                return Err(schema(format!("timing {name} = {v} is negative")));
            }
        }
        match self.problem.variant.as_str() {
            "reg" if self.problem.mu.is_some() && self.problem.k.is_none() => {}
            "card" if self.problem.k.is_some() && self.problem.mu.is_none() => {}
            other => return Err(schema(format!("inconsistent problem block for variant {other:?}"))),
        }
        let n = self.instance.n;
        if let Some(s) = &self.screen {
            if s.fixes.len() != n || s.n_zero + s.n_one + s.n_free != n {
                return Err(schema("screen counts do not match the fixes array"));
            }
            let count = |st| s.fixes.iter().filter(|&&f| f == st).count();
            if count(FixState::Zero) != s.n_zero || count(FixState::One) != s.n_one {
                return Err(schema("screen counts do not match the fixes array"));
            }
        }
        if let Some(s) = &self.solve {
            if s.x.len() != n || !s.support.windows(2).all(|w| w[0] < w[1]) || s.support.iter().any(|&i| i >= n) {
                return Err(schema("solution support must be sorted, unique and within 0..n"));
            }
            if s.wall_time_s < 0.0 {
                return Err(schema("negative wall time"));
            }
        }
        Ok(())
    }
}

/// Parses and checks a run report, requiring an exact JSON round trip.
pub fn validate_report(text: &str) -> Result<RunReport, CliError> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    let report: RunReport = serde_json::from_value(raw.clone()).map_err(|e| schema(e.to_string()))?;
    if serde_json::to_value(&report).map_err(|e| schema(e.to_string()))? != raw {
        return Err(schema("report does not round-trip"));
    }
    report.check()?;
    Ok(report)
}

pub fn write_bench<W: std::io::Write>(out: W, rows: &[BenchRow]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BENCH_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses and checks bench CSV, requiring the exact header and a record-level round trip.
pub fn validate_bench(text: &str) -> Result<Vec<BenchRow>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != BENCH_COLUMNS {
        return Err(schema(format!("bench header must be {}", BENCH_COLUMNS.join(","))));
    }
    let records: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let row: BenchRow = rec
            .deserialize(None)
            .map_err(|e| schema(format!("row {}: {e}", i + 2)))?;
        if !(0.0..=100.0).contains(&row.fixed_pct) || row.time_s < 0.0 {
            return Err(schema(format!("row {}: fixed_pct or time_s out of range", i + 2)));
        }
        rows.push(row);
    }
    let mut again = Vec::new();
    write_bench(&mut again, &rows)?;
    let mut reread = csv::Reader::from_reader(again.as_slice());
    let back: Vec<csv::StringRecord> = reread.records().collect::<Result<_, _>>()?;
    if back != records {
        return Err(schema("bench CSV does not round-trip"));
    }
    Ok(rows)
}

pub fn validate_meta(text: &str) -> Result<l0screen::datagen::DatasetMeta, CliError> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    let meta: l0screen::datagen::DatasetMeta = serde_json::from_value(raw.clone()).map_err(|e| schema(e.to_string()))?;
    if serde_json::to_value(&meta).map_err(|e| schema(e.to_string()))? != raw {
        return Err(schema("meta.json does not round-trip"));
    }
    Ok(meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemaKind {
    Report,
    Bench,
    Meta,
}

/// Validates `path` against the schema of `kind`; returns a one-line summary.
pub fn validate_file(kind: SchemaKind, path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(l0screen::Error::from)?;
    Ok(match kind {
        SchemaKind::Report => format!("valid run report ({})", validate_report(&text)?.command),
        SchemaKind::Bench => format!("valid bench CSV ({} rows)", validate_bench(&text)?.len()),
        SchemaKind::Meta => format!("valid dataset metadata (n = {})", validate_meta(&text)?.n),
    })
}
