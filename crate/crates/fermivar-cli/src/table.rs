//! Tidy CSV tables for plotting tools.
//!
//! Dialect: comma separated, `.` decimal point, LF line endings, UTF-8. Floats
//! are written in Rust's shortest round-trip form. An empty table still has
//! its header line.

use std::io::Write;
use std::path::Path;

/// A cell value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) if v.is_finite() => format!("{v:?}"),
            Self::Float(v) => v.to_string(),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::Empty, Self::Float)
    }
}

/// A named table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; the table is written to `<name>.csv`.
    pub name: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&'static str]) -> Self {
        Self { name: name.to_string(), headers: headers.to_vec(), rows: Vec::new() }
    }

    /// Appends a row; its length must match the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Serializes the table in the documented dialect.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&self.headers).expect("writing to memory");
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render)).expect("writing to memory");
        }
        writer.into_inner().expect("flushing to memory")
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut file = std::fs::File::create(dir.join(self.file_name()))?;
        file.write_all(&self.to_bytes())
    }
}
