//! Deterministic report artifacts: JSON-lines check records and CSV
//! convergence tables.
//!
//! Floats are rendered with shortest round-trip formatting, so a report is
//! byte-identical across runs of the same seeded computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verify::IdentityReport;

/// One structured check line: what was compared, on which inputs, and how
/// far apart the two sides came out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Builds a record; pass means |residual| <= tolerance.
    pub fn new(
        name: impl Into<String>,
        inputs: impl Into<String>,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual.abs() <= tolerance,
        }
    }

    /// A record that must *exceed* the threshold to pass: negative controls.
    pub fn control(
        name: impl Into<String>,
        inputs: impl Into<String>,
        observed: f64,
        floor: f64,
    ) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            lhs: observed,
            rhs: 0.0,
            residual: observed,
            tolerance: floor,
            pass: observed.abs() > floor,
        }
    }
}

/// Ordered collection of check records with JSON-lines rendering.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// One JSON object per line, trailing newline included.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: CheckRecord = serde_json::from_str(line).map_err(|e| {
                Error::Config(format!("report line {}: {e}", i + 1))
            })?;
            records.push(r);
        }
        Ok(Report { records })
    }
}

/// External shape of one identity evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub quadrature_level: u32,
    pub a_constant: f64,
}

/// Flattens an identity report to one record per quadrature level. The
/// relative residual is measured against the larger side, floored at unit
/// scale since both sides vanish for exact data.
pub fn identity_records(report: &IdentityReport) -> Vec<IdentityRecord> {
    report
        .levels
        .iter()
        .map(|l| {
            let abs = (l.lhs - l.rhs).abs();
            IdentityRecord {
                lhs: l.lhs,
                rhs: l.rhs,
                abs_residual: abs,
                rel_residual: abs / l.lhs.abs().max(l.rhs.abs()).max(1.0),
                quadrature_level: l.level,
                a_constant: report.a,
            }
        })
        .collect()
}

/// Renders a CSV table; empty cells are admitted as NaN entries.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| if v.is_nan() { String::new() } else { v.to_string() })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
