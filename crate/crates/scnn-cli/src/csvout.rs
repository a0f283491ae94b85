//! Deterministic CSV assembly: resolved-config comment lines, a header,
//! then data rows. Floats are written in shortest round-trip form so
//! identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use scnn_core::Result;

pub struct CsvDoc {
    config: Vec<(String, String)>,
    header: String,
    rows: Vec<String>,
}

impl CsvDoc {
    pub fn new(header: &str) -> CsvDoc {
        CsvDoc {
            config: Vec::new(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl std::fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            writeln!(out, "# {k}={v}").expect("string write");
        }
        writeln!(out, "{}", self.header).expect("string write");
        for row in &self.rows {
            writeln!(out, "{row}").expect("string write");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.render())?;
        Ok(())
    }
}

pub fn f(v: f64) -> String {
    format!("{v}")
}

/// Seconds with millisecond resolution; suppressed to a fixed zero unless
/// timing output was requested, keeping default CSVs byte-reproducible.
pub fn secs(v: f64, timings_enabled: bool) -> String {
    if timings_enabled {
        format!("{v:.3}")
    } else {
        "0.000".to_string()
    }
}
