//! Batch runner behind the `maxreg` binary: validated configurations in,
//! versioned JSON reports and CSV tables out.

pub mod config;
mod experiments;

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub use config::{ExperimentConfig, Kind, RunConfig, ValidationError};
pub use experiments::run_experiment;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// A measured quantity against its declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            relation: "<=",
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            relation: ">=",
            pass: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NonConvergence,
    Error,
}

/// Column names and rows; cells are numbers, strings or null.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(cell).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub index: usize,
    pub kind: Kind,
    pub status: Status,
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub constants: BTreeMap<String, f64>,
    pub table: Table,
    /// Extra output written next to the table on request.
    #[serde(skip)]
    pub artifact: Option<Value>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Ok && self.checks.iter().all(|c| c.pass)
    }

    pub fn file_stem(&self) -> String {
        format!("{:02}-{}", self.index, self.kind.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub library_version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub experiments: Vec<Outcome>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

/// Runs every experiment in order.
pub fn run(config: &RunConfig, seed: u64) -> Report {
    let experiments: Vec<Outcome> = config
        .experiments
        .iter()
        .enumerate()
        .map(|(i, e)| run_experiment(i, e, seed))
        .collect();
    Report {
        schema_version: SCHEMA_VERSION,
        library_version: maxreg_core::VERSION.to_string(),
        seed,
        config: config.clone(),
        passed: experiments.iter().all(Outcome::passed),
        experiments,
        timestamp: None,
    }
}

/// Seconds since the Unix epoch.
pub fn timestamp_now() -> String {
    let s = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{s}")
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// `report.json` plus one CSV per experiment in `dir`.
pub fn write_outputs(report: &Report, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report_json(report))?;
    for o in &report.experiments {
        std::fs::write(dir.join(format!("{}.csv", o.file_stem())), o.table.to_csv())?;
    }
    Ok(())
}

pub fn exit_code(report: &Report) -> i32 {
    let statuses = || report.experiments.iter().map(|o| o.status);
    if statuses().any(|s| s == Status::NonConvergence) {
        EXIT_NONCONVERGENCE
    } else if statuses().any(|s| s == Status::Error) {
        EXIT_VALIDATION
    } else {
        EXIT_OK
    }
}
