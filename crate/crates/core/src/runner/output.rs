//! Output records and their CSV serialization.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::runner::config::RunConfig;

pub const CODE_VERSION: &str = concat!("casimir-lattice ", env!("CARGO_PKG_VERSION"));

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Num(v) => Some(v),
            Cell::Text(_) => None,
        }
    }

    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}"),
            // Debug formatting is the shortest string that round-trips.
            Cell::Num(v) => write!(out, "{v:?}"),
            Cell::Text(t) => write!(out, "{t}"),
        }
        .expect("write to string");
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    /// Named columns, one row per data point.
    Table,
    /// A `z x x` matrix: row `z`, column `x`.
    DensityMap,
}

/// Contents of one output file.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputRecord {
    /// File stem.
    pub name: String,
    pub kind: RecordKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    pub fn table(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            kind: RecordKind::Table,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Density map from `map[z][x]`.
    pub fn density_map(name: &str, map: &[Vec<f64>]) -> Self {
        let nx = map.first().map_or(0, Vec::len);
        Self {
            name: name.to_string(),
            kind: RecordKind::DensityMap,
            columns: (0..nx).map(|x| format!("x{x}")).collect(),
            rows: map.iter().map(|r| r.iter().map(|&v| Cell::Num(v)).collect()).collect(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column `name` as numbers.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Complete,
    /// Some tasks failed; only fully measured data points were written.
    Incomplete(String),
}

/// Everything one experiment produced.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSet {
    pub config: RunConfig,
    pub records: Vec<OutputRecord>,
    pub status: RunStatus,
}

impl OutputSet {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    pub fn record(&self, name: &str) -> Option<&OutputRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

fn header(set: &OutputSet, record: &OutputRecord) -> String {
    let mut h = String::new();
    let status = match &set.status {
        RunStatus::Complete => "complete".to_string(),
        RunStatus::Incomplete(why) => format!("INCOMPLETE ({})", why.replace('\n', " ")),
    };
    let kind = match record.kind {
        RecordKind::Table => "table",
        RecordKind::DensityMap => "density map, rows z, columns x",
    };
    writeln!(h, "# version: {CODE_VERSION}").unwrap();
    writeln!(h, "# experiment: {}", set.config.experiment.name()).unwrap();
    writeln!(h, "# seed: {}", set.config.seed).unwrap();
    writeln!(h, "# status: {status}").unwrap();
    writeln!(h, "# record: {} ({kind})", record.name).unwrap();
    writeln!(h, "# config:").unwrap();
    for line in set.config.to_toml().lines() {
        writeln!(h, "#   {line}").unwrap();
    }
    h
}

/// Renders one record as CSV text.
pub fn render_record(set: &OutputSet, record: &OutputRecord) -> String {
    let mut out = header(set, record);
    if record.kind == RecordKind::Table {
        out.push_str(&record.columns.join(","));
        out.push('\n');
    }
    for row in &record.rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            cell.render(&mut out);
        }
        out.push('\n');
    }
    out
}

/// Writes every record to `<dir>/<name>.csv`; returns the paths written.
pub fn emit_outputs(set: &OutputSet, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(set.records.len());
    for record in &set.records {
        let path = dir.join(format!("{}.csv", record.name));
        fs::write(&path, render_record(set, record)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
