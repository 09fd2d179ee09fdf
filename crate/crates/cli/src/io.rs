//! File emission: CSV tables (comma separator, LF endings, full double
//! precision via the shortest round-trip formatting) and JSON documents.

use curlgap_core::{CylGrid, Field};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::CliError;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::from)
}

/// Rows of `(k, nu_lo, nu_hi)`, one per band, 1-based.
pub fn write_band_csv(path: &Path, edges: &[f64]) -> Result<(), CliError> {
    let mut out = String::from("k,nu_lo,nu_hi\n");
    for k in 0..edges.len() / 2 {
        out.push_str(&format!("{},{},{}\n", k + 1, edges[2 * k], edges[2 * k + 1]));
    }
    std::fs::write(path, out).map_err(CliError::from)
}

/// Matching-curve samples; unevaluable points (the pole of `g`) leave the
/// cell empty rather than propagating NaN.
pub fn write_curves_csv(
    path: &Path,
    rows: &[(f64, Option<f64>, Option<f64>)],
) -> Result<(), CliError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "mu,g,h")?;
    for (mu, g, h) in rows {
        let g = g.map(|v| v.to_string()).unwrap_or_default();
        let h = h.map(|v| v.to_string()).unwrap_or_default();
        writeln!(w, "{mu},{g},{h}")?;
    }
    Ok(())
}

/// Field export: `r,x3,u` rows, row-major over the grid.
pub fn write_field_csv(path: &Path, field: &Field) -> Result<(), CliError> {
    let g = field.grid();
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "r,x3,u")?;
    for i in 0..g.nr() {
        for j in 0..g.nz() {
            writeln!(w, "{},{},{}", g.r(i), g.z(j), field.at(i, j))?;
        }
    }
    Ok(())
}

/// Grid sidecar for a field CSV.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct GridSidecar {
    pub r_max: f64,
    pub z_half: f64,
    pub nr: usize,
    pub nz: usize,
}

impl From<&CylGrid> for GridSidecar {
    fn from(g: &CylGrid) -> Self {
        Self {
            r_max: g.r_max(),
            z_half: g.z_half(),
            nr: g.nr(),
            nz: g.nz(),
        }
    }
}
