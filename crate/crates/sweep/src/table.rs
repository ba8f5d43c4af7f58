//! In-memory result tables and their CSV form.

use std::fmt::Write as _;

use crate::spec::SweepSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // 17 significant digits, locale independent
            Cell::Num(x) => write!(out, "{x:.16e}").unwrap(),
            Cell::Int(n) => write!(out, "{n}").unwrap(),
            Cell::Text(s) => out.push_str(&s.replace([',', '\n', '\r'], ";")),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Rows in declared order plus free-form notes for the preamble.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            ..Default::default()
        }
    }

    pub fn index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == column)
    }

    /// Numeric values of `column`; panics on an unknown name.
    pub fn column(&self, column: &str) -> Vec<f64> {
        let i = self.index(column).unwrap_or_else(|| panic!("no column `{column}`"));
        self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn text_column(&self, column: &str) -> Vec<String> {
        let i = self.index(column).unwrap_or_else(|| panic!("no column `{column}`"));
        self.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Text(s) => s.clone(),
                other => format!("{other:?}"),
            })
            .collect()
    }

    /// CSV with a `#` preamble carrying the command, spec hash and notes.
    pub fn to_csv(&self, spec: &SweepSpec) -> String {
        let mut out = String::new();
        writeln!(out, "# quench {}", spec.command).unwrap();
        writeln!(out, "# spec_sha256 = {}", spec.hash()).unwrap();
        writeln!(out, "# spec = {}", spec.canonical()).unwrap();
        for note in &self.notes {
            writeln!(out, "# {note}").unwrap();
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
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
}
