//! Deterministic tabular output: comma-separated, 17 significant digits,
//! header row, LF line endings; plus a JSON metadata sidecar.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use crate::config::RunConfig;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Formats a float with 17 significant digits; non-finite values print as `nan`, `inf`, `-inf`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// An in-memory table written in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                match c {
                    Cell::Num(v) => s.push_str(&fmt_num(*v)),
                    Cell::Int(v) => {
                        let _ = write!(s, "{v}");
                    }
                    Cell::Flag(b) => s.push_str(if *b { "1" } else { "0" }),
                    Cell::Text(t) => s.push_str(t),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).with_context(|| format!("writing {}", path.display()))
    }
}

/// Writes `meta.json` with the command, library version, seed and config echo.
pub fn write_meta(dir: &Path, command: &str, cfg: &RunConfig, seed: u64, files: &[&str]) -> Result<()> {
    let meta = json!({
        "command": command,
        "library": "spar-core",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "files": files,
        "config": cfg,
    });
    let text = serde_json::to_string_pretty(&meta)? + "\n";
    let path = dir.join("meta.json");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_num(f64::NAN), "nan");
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Num(1.0), Cell::Flag(true)]);
        assert_eq!(t.to_csv(), "a,b\n1.0000000000000000e0,1\n");
    }
}
