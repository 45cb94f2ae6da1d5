//! Verification reports and their JSON/CSV encodings.
//!
//! JSON key order is the field order of the structs below; maps are
//! `BTreeMap`s so their keys come out sorted. Floats use serde_json's
//! shortest round-trip formatting.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::{CliError, Result};
use crate::scan::ScanOutcome;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub artifact_version: String,
    pub config: Value,
    pub seed: Option<u64>,
    /// Left null unless requested, so repeated runs stay byte-identical.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    /// `[re, im]` per coordinate.
    pub point: Vec<[f64; 2]>,
    pub quantities: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
    /// Error name per check that failed to evaluate.
    pub errors: BTreeMap<String, String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Pass iff residual ≤ threshold.
    Tolerance,
    /// Pass iff residual ≥ threshold.
    Floor,
}

impl Mode {
    pub fn passes(self, residual: f64, threshold: f64) -> bool {
        match self {
            Mode::Tolerance => residual <= threshold,
            Mode::Floor => residual >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub mode: Mode,
    pub threshold: f64,
    /// Largest residual in tolerance mode, smallest in floor mode; null if
    /// nothing evaluated.
    pub worst: Option<f64>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub all_pass: bool,
    pub points: usize,
    pub checks: BTreeMap<String, CheckSummary>,
    /// Observed values of floor checks, for freezing new floors.
    pub regression_constants: BTreeMap<String, f64>,
    pub scan: Option<ScanOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub header: Header,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per (point, check): `point_index, z0_re, z0_im, …, check, value, tolerance, pass`.
    /// A check that errored has an empty value and its error name in place of
    /// the pass flag's companion column `error`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let dim = self.records.first().map_or(0, |r| r.point.len());
        let mut w = csv::Writer::from_writer(out);
        let mut head = vec!["point_index".to_string()];
        for i in 0..dim {
            head.push(format!("z{i}_re"));
            head.push(format!("z{i}_im"));
        }
        head.extend(["check", "value", "tolerance", "pass", "error"].map(String::from));
        w.write_record(&head)?;
        for r in &self.records {
            for (check, s) in &self.summary.checks {
                let mut row = vec![r.index.to_string()];
                for c in &r.point {
                    row.push(c[0].to_string());
                    row.push(c[1].to_string());
                }
                let value = r.residuals.get(check);
                let pass = value.is_some_and(|&v| s.mode.passes(v, s.threshold));
                row.push(check.clone());
                row.push(value.map_or(String::new(), |v| v.to_string()));
                row.push(s.threshold.to_string());
                row.push(pass.to_string());
                row.push(r.errors.get(check).cloned().unwrap_or_default());
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

pub fn emit_report(report: &VerificationReport, format: Format, path: &Path) -> Result<()> {
    let io = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    match format {
        Format::Json => w.write_all(report.to_json().as_bytes()).map_err(io)?,
        Format::Csv => report.write_csv(&mut w).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => io(source),
            other => CliError::config(format!("csv encoding failed: {other:?}")),
        })?,
    }
    w.flush().map_err(io)
}
