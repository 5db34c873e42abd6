//! Deterministic CSV emission: header row mandatory, numbers at 16
//! significant digits, `\n` line endings, optional timestamp comment line.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

/// One CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub struct CsvDoc {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvDoc {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, command: &str, with_timestamp: bool) -> String {
        let mut out = String::new();
        if with_timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "# frac-ab {command} generated-unix-seconds={secs}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(render_cell).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path, command: &str, with_timestamp: bool) -> io::Result<()> {
        fs::write(path, self.render(command, with_timestamp))
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Text(s) => s.clone(),
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => {
            if v.is_nan() {
                "nan".to_string()
            } else if v.is_infinite() {
                if *v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
            } else {
                // 16 significant digits.
                format!("{v:.15e}")
            }
        }
    }
}
