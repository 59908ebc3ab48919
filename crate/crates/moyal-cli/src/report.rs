//! Machine-readable experiment reports and plot traces.

use moyal::error::Result;
use serde::Serialize;
use std::fs;
use std::path::Path;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// measured ≤ tolerance.
    pub fn upper(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured.is_finite() && measured <= tolerance,
            measured,
            tolerance,
            detail: None,
        }
    }

    /// measured within [lo, hi]; the tolerance field records the width.
    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured.is_finite() && measured >= lo && measured <= hi,
            measured,
            tolerance: hi - lo,
            detail: Some(format!("allowed [{lo}, {hi}]")),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_reports: Option<Vec<serde_json::Value>>,
}

impl Report {
    pub fn new(experiment: &str, checks: Vec<Check>, warnings: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report {
            schema: REPORT_SCHEMA,
            experiment: experiment.to_string(),
            passed,
            checks,
            warnings,
            norm_reports: None,
        }
    }
}

/// Plot trace: a header and numeric rows, written as CSV.
#[derive(Debug, Default)]
pub struct Plot {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Plot {
    pub fn new(columns: &[&str]) -> Self {
        Plot { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_outputs(prefix: &str, report: &Report, plot: &Plot) -> Result<()> {
    if let Some(parent) = Path::new(prefix).parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(format!("{prefix}.report.json"), json + "\n")?;
    fs::write(format!("{prefix}.plot.csv"), plot.to_csv())?;
    Ok(())
}
