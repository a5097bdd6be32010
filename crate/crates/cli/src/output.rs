//! Run reports and deterministic artifact writing.
//!
//! Every run produces `results.csv` (fixed columns per experiment, rows in a
//! deterministic order) and `manifest.json` (config echo including derived
//! quantities, assertion outcomes, and the tool version). Artifacts carry no
//! timestamps or environment-dependent values, so two runs of the same
//! config with the same seed produce byte-identical files.

use std::fs;
use std::io;
use std::path::Path;

use pcnls_core::{write_snapshot, Field};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

/// Comparison direction for an assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    /// measured < bound
    Below,
    /// measured <= bound
    AtMost,
    /// measured >= bound
    AtLeast,
    /// measured > bound
    Above,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Below => "<",
            Cmp::AtMost => "<=",
            Cmp::AtLeast => ">=",
            Cmp::Above => ">",
        }
    }
}

/// One named check with its measured value and tolerance.
#[derive(Debug, Clone)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub cmp: Cmp,
    pub bound: f64,
}

impl Assertion {
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, cmp: Cmp::Below, bound }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, cmp: Cmp::AtMost, bound }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, cmp: Cmp::AtLeast, bound }
    }

    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Assertion { name: name.into(), measured, cmp: Cmp::Above, bound }
    }

    /// Non-finite measurements always fail.
    pub fn passed(&self) -> bool {
        if !self.measured.is_finite() {
            return false;
        }
        match self.cmp {
            Cmp::Below => self.measured < self.bound,
            Cmp::AtMost => self.measured <= self.bound,
            Cmp::AtLeast => self.measured >= self.bound,
            Cmp::Above => self.measured > self.bound,
        }
    }
}

/// The complete outcome of one experiment run.
#[derive(Debug, Default)]
pub struct RunReport {
    /// CSV header, fixed per experiment kind.
    pub columns: Vec<&'static str>,
    /// CSV rows, already in their declared sort order.
    pub rows: Vec<Vec<String>>,
    /// Pass/fail checks with pinned tolerances.
    pub assertions: Vec<Assertion>,
    /// Measured constants that are reported but not asserted.
    pub reported: Vec<(String, f64)>,
    /// Fields to persist when the config asks for snapshots.
    pub snapshots: Vec<(String, Field)>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }
}

/// Shortest round-trip decimal rendering, used for every numeric CSV cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes results.csv, manifest.json, and any requested snapshots.
pub fn write_artifacts(
    cfg: &ExperimentConfig,
    preset: Option<&str>,
    report: &RunReport,
) -> io::Result<()> {
    let dir = Path::new(&cfg.out_dir);
    fs::create_dir_all(dir)?;
    write_results_csv(&dir.join("results.csv"), &report.columns, &report.rows)?;
    let manifest = manifest_json(cfg, preset, report);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    if cfg.snapshots {
        for (name, field) in &report.snapshots {
            write_snapshot(field, &dir.join(format!("{name}.snap")))
                .map_err(|e| io::Error::other(e.to_string()))?;
        }
    }
    Ok(())
}

fn write_results_csv(path: &Path, columns: &[&'static str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(columns)?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len(), "row width mismatch");
        writer.write_record(row)?;
    }
    writer.flush()
}

/// Builds the manifest document. Keys serialize in sorted order and all
/// numbers use shortest round-trip rendering, keeping the bytes stable.
pub fn manifest_json(cfg: &ExperimentConfig, preset: Option<&str>, report: &RunReport) -> Value {
    let params: serde_json::Map<String, Value> = cfg
        .params
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let assertions: Vec<Value> = report
        .assertions
        .iter()
        .map(|a| {
            json!({
                "name": a.name,
                "measured": a.measured,
                "cmp": a.cmp.symbol(),
                "bound": a.bound,
                "passed": a.passed(),
            })
        })
        .collect();
    let reported: serde_json::Map<String, Value> =
        report.reported.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "tool": { "name": "pcnls", "version": env!("CARGO_PKG_VERSION") },
        "preset": preset,
        "experiment": {
            "name": cfg.name,
            "dimension": cfg.dimension,
            "seed": cfg.seed,
            "rho": cfg.rho(),
            "grid": { "points": cfg.points, "half_width": cfg.half_width },
            "solver": { "lambda": cfg.lambda, "dt": cfg.dt, "dealias": cfg.dealias },
            "params": params,
            "output": { "dir": cfg.out_dir, "snapshots": cfg.snapshots },
        },
        "columns": report.columns,
        "row_count": report.rows.len(),
        "assertions": assertions,
        "reported": reported,
        "passed": report.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertions_compare_correctly() {
        assert!(Assertion::below("a", 1.0, 2.0).passed());
        assert!(!Assertion::below("a", 2.0, 2.0).passed());
        assert!(Assertion::at_most("a", 2.0, 2.0).passed());
        assert!(Assertion::at_least("a", 2.0, 2.0).passed());
        assert!(!Assertion::above("a", 2.0, 2.0).passed());
        assert!(Assertion::above("a", 3.0, 2.0).passed());
        assert!(!Assertion::below("a", f64::NAN, 1.0).passed());
        assert!(!Assertion::at_least("a", f64::INFINITY, 1.0).passed());
    }

    #[test]
    fn float_cells_round_trip() {
        for v in [0.5, 1.0, 1e-10, 0.1 + 0.2, -3.25e7] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.125), "0.125");
    }
}
