//! CSV tables and the JSON report envelope.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{config_err, CliError, CliResult};

pub const VERSION: &str = env!("AJM_VERSION");

/// Largest allowed deviation of an emitted probability row sum from 1.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;

/// One CSV cell. Floats print with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(u64),
    B(bool),
    S(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a C,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub results: R,
}

/// Fails with a numerical error when `probs` does not sum to 1.
pub fn check_probability_row(what: &str, probs: &[f64]) -> CliResult<()> {
    let s: f64 = probs.iter().sum();
    if !((s - 1.0).abs() <= PROBABILITY_SUM_TOL) {
        return Err(CliError::Numerical(format!("{what}: probabilities sum to {s}, not 1")));
    }
    Ok(())
}

/// Writes `<out>/<command>.csv` and `<out>/<command>.json`, creating `out`.
pub fn write_outputs<C: Serialize, R: Serialize>(
    out: &Path,
    report: &Report<'_, C, R>,
    table: &Table,
) -> CliResult<(PathBuf, PathBuf)> {
    fs::create_dir_all(out).map_err(|e| config_err(format!("cannot create {}: {e}", out.display())))?;
    let csv_path = out.join(format!("{}.csv", report.command));
    let json_path = out.join(format!("{}.json", report.command));
    let mut json = serde_json::to_string_pretty(report).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    json.push('\n');
    fs::write(&csv_path, table.to_csv()?).map_err(|e| config_err(format!("cannot write {}: {e}", csv_path.display())))?;
    fs::write(&json_path, json).map_err(|e| config_err(format!("cannot write {}: {e}", json_path.display())))?;
    Ok((csv_path, json_path))
}
