//! CSV emission with shortest round-trip number formatting.

use std::path::Path;

use esdlab_core::analysis::EsdTime;

use crate::error::{CliError, CliResult};

/// Shortest decimal that parses back to exactly `x`; exponent form outside
/// [1e-4, 1e16). Infinity is written as `inf`.
pub fn format_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let m = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn format_esd(t: EsdTime) -> String {
    format_f64(t.as_f64())
}

/// Column-major table written row by row.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push_row(row.iter().map(|&v| format_f64(v)).collect());
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    /// Values of column `i` as written.
    pub fn column(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[i].parse().unwrap_or(f64::NAN))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::runtime)?;
        for row in &self.rows {
            w.write_record(row).map_err(CliError::runtime)?;
        }
        w.into_inner().map_err(CliError::runtime)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let bytes = self.to_bytes()?;
        std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}
