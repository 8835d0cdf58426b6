//! CSV tables and metadata sidecars.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let columns: Vec<String> = (0..m.ncols()).map(|j| format!("c{j}")).collect();
        let rows = m
            .row_iter()
            .map(|r| r.iter().map(|v| Cell::Real(*v)).collect())
            .collect();
        Table { columns, rows }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let to_err = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
        w.write_record(&self.columns).map_err(to_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(to_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
        fs::write(path, bytes).map_err(|e| CliError::io(path, e))
    }
}

/// A CSV file read back as text cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    pub fn read(path: &Path) -> Result<Self> {
        let to_err = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
        let mut r = csv::Reader::from_path(path).map_err(to_err)?;
        let columns = r.headers().map_err(to_err)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()
            .map_err(to_err)?;
        Ok(CsvData { columns, rows })
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        match self.columns.iter().position(|c| c == name) {
            Some(i) => Ok(i),
            None => invalid(format!("no column '{name}' (have {:?})", self.columns)),
        }
    }

    /// Numeric values of a column over the selected rows.
    pub fn numeric(&self, name: &str, rows: &[usize]) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        rows.iter()
            .map(|r| {
                let text = &self.rows[*r][i];
                text.parse::<f64>()
                    .or_else(|_| invalid(format!("column '{name}': '{text}' is not numeric")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub seed: u64,
    /// The effective configuration in the input format.
    pub config: String,
    pub outputs: Vec<String>,
    pub summary: BTreeMap<String, serde_json::Value>,
}

impl Metadata {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("metadata is serializable");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}
