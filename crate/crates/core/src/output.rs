//! Plain-text artifact writers. Every table is indexed by display-centred
//! waveguide labels, and floats use Rust's shortest round-trip formatting, so
//! identical inputs give byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_with(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Shortest round-trip text for `v`, switching to exponent form outside
/// `[1e-4, 1e16)` so tiny tails stay short.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Square matrix with a header row and column of labels. `cell` renders an
/// entry, or returns `None` for `NA`.
pub fn write_matrix_csv(
    path: &Path,
    labels: &[i64],
    cell: impl Fn(usize, usize) -> Option<f64>,
) -> Result<()> {
    write_with(path, |w| {
        write!(w, "q\\r")?;
        for l in labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (q, lq) in labels.iter().enumerate() {
            write!(w, "{lq}")?;
            for r in 0..labels.len() {
                match cell(q, r) {
                    Some(v) => write!(w, ",{}", format_f64(v))?,
                    None => write!(w, ",NA")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

/// Columns of equal length under the given headers.
pub fn write_columns_csv(path: &Path, headers: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let rows = columns.first().map_or(0, Vec::len);
    write_with(path, |w| {
        writeln!(w, "{}", headers.join(","))?;
        for i in 0..rows {
            let line: Vec<String> = columns.iter().map(|c| format_f64(c[i])).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    })
}

/// Plain PGM (P2), 16-bit, with the largest entry mapped to 65535. Negative
/// entries are written as 0. Returns the scale maximum.
pub fn write_pgm(path: &Path, m: &DMatrix<f64>) -> Result<f64> {
    let max = m.iter().cloned().fold(0.0f64, f64::max);
    write_with(path, |w| {
        writeln!(w, "P2")?;
        writeln!(w, "{} {}", m.ncols(), m.nrows())?;
        writeln!(w, "65535")?;
        for q in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols())
                .map(|r| pgm_level(m[(q, r)], max).to_string())
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    })?;
    Ok(max)
}

pub(crate) fn pgm_level(v: f64, max: f64) -> u16 {
    if max <= 0.0 || v <= 0.0 {
        0
    } else {
        (v / max * 65535.0).round().min(65535.0) as u16
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON value serialises");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}
