//! CSV result tables with trailing provenance columns, and the stderr summary.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Shortest round-trip decimal, switching to exponent form for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-4..1e7).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Provenance {
    pub refs: String,
    pub params: String,
    pub seed: u64,
    pub config_sha256: String,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, prov: &Provenance) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        let mut header = self.header.clone();
        header.extend(["refs", "params", "seed", "config_sha256"].map(String::from));
        w.write_record(&header).map_err(io)?;
        let seed = prov.seed.to_string();
        for row in &self.rows {
            let mut r = row.clone();
            r.extend([prov.refs.clone(), prov.params.clone(), seed.clone(), prov.config_sha256.clone()]);
            w.write_record(&r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
