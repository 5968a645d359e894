use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;

/// Output root override.
pub const OUT_ENV: &str = "GIBBS_SOS_OUT";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

/// One asserted tolerance with its measured value. `lo`/`hi` are the band
/// edges, either of which may be open.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), measured, lo: Some(lo), hi: Some(hi), passed: measured >= lo && measured <= hi }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, hi: f64) -> Self {
        Self { name: name.into(), measured, lo: None, hi: Some(hi), passed: measured <= hi }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, lo: f64) -> Self {
        Self { name: name.into(), measured, lo: Some(lo), hi: None, passed: measured >= lo }
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self::within(name, measured, target - tol, target + tol)
    }
}

/// Data and checks of one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `$GIBBS_SOS_OUT/<output>` when the variable is set, else `<output>`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUT_ENV) {
        Some(root) if !root.is_empty() => Path::new(&root).join(&cfg.output),
        _ => cfg.output.clone(),
    }
}

pub fn render_csv(cfg: &ExperimentConfig, table: &Table) -> std::io::Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(format!("# experiment: {}\n# seed: {}\n# crate: gibbs-sos {}\n", cfg.experiment, cfg.seed, env!("CARGO_PKG_VERSION")).as_bytes());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

fn pretty(v: &impl Serialize) -> std::io::Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// Write `data.csv`, `manifest.json` and `report.json` into `dir`. Files are
/// staged in a sibling directory and moved in place at the end, so a failure
/// leaves no partial set behind.
pub fn write_artifacts(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome) -> std::io::Result<()> {
    let csv = render_csv(cfg, &outcome.table)?;
    let manifest = pretty(&serde_json::json!({
        "crate": format!("gibbs-sos {}", env!("CARGO_PKG_VERSION")),
        "config": cfg,
        "columns": outcome.table.columns,
    }))?;
    let report = pretty(&serde_json::json!({
        "experiment": cfg.experiment,
        "passed": outcome.passed(),
        "checks": outcome.checks,
        "details": outcome.details,
    }))?;
    let parent = dir.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let staging = parent.join(format!(".{name}.staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;
    let staged = (|| {
        fs::write(staging.join("data.csv"), &csv)?;
        fs::write(staging.join("manifest.json"), &manifest)?;
        fs::write(staging.join("report.json"), &report)?;
        if dir.exists() {
            fs::remove_dir_all(dir)?;
        }
        fs::rename(&staging, dir)
    })();
    if staged.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    staged
}
