//! CSV artifacts: one `#` header line, a column row, then data rows.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct Table {
    header: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &str, columns: &[&'static str]) -> Self {
        Self {
            header: header.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, file: &str) -> Result<PathBuf> {
        let path = dir.join(file);
        let mut bytes = format!("{}\n", self.header).into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut bytes);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Degrees from radians, rounded to 1e-9 so grid angles print cleanly.
pub fn deg(rad: f64) -> String {
    num((rad.to_degrees() * 1e9).round() / 1e9)
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
