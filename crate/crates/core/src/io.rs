//! Matrix serialization: plain CSV for interchange and the DDRP binary
//! container for bit-exact round trips.
//!
//! CSV files are row-major, one row per line, values separated by commas,
//! `.` as the decimal separator, no header.  Values are printed with Rust's
//! shortest round-trip `f64` formatting, so `read(write(m))` reproduces `m`
//! exactly.
//!
//! The DDRP container is: magic bytes `DDRP`, format version as `u16`,
//! row and column counts as `u32`, then `rows * cols` IEEE-754 doubles in
//! row-major order.  All integers and doubles are little-endian.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Magic bytes identifying the binary matrix container.
pub const DDRP_MAGIC: [u8; 4] = *b"DDRP";
/// Current version of the binary container layout.
pub const DDRP_VERSION: u16 = 1;

/// Writes `m` as headerless CSV, one matrix row per line.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut line = String::new();
    for i in 0..m.nrows() {
        line.clear();
        for j in 0..m.ncols() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&m[(i, j)].to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a headerless CSV matrix written by [`write_matrix_csv`].
///
/// Every line must hold the same number of comma-separated values.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut values: Vec<f64> = Vec::new();
    let mut cols = 0usize;
    let mut rows = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::format(path, format!("line {}: not a number: {field:?}", lineno + 1))
            })?;
            values.push(v);
            count += 1;
        }
        if rows == 0 {
            cols = count;
        } else if count != cols {
            return Err(Error::format(
                path,
                format!("line {}: expected {cols} values, found {count}", lineno + 1),
            ));
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::format(path, "no data rows"));
    }
    Ok(DMatrix::from_row_iterator(rows, cols, values))
}

/// Writes `m` in the DDRP binary container.
pub fn write_matrix_ddrp(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let rows = u32::try_from(m.nrows())
        .map_err(|_| Error::Config(format!("matrix has too many rows: {}", m.nrows())))?;
    let cols = u32::try_from(m.ncols())
        .map_err(|_| Error::Config(format!("matrix has too many columns: {}", m.ncols())))?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        w.write_all(&DDRP_MAGIC)?;
        w.write_all(&DDRP_VERSION.to_le_bytes())?;
        w.write_all(&rows.to_le_bytes())?;
        w.write_all(&cols.to_le_bytes())?;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                w.write_all(&m[(i, j)].to_le_bytes())?;
            }
        }
        w.flush()
    };
    run().map_err(|e| Error::io(path, e))
}

/// Reads a matrix from the DDRP binary container.
///
/// Validates the magic bytes, the version, and that the payload length
/// matches the declared shape exactly.
pub fn read_matrix_ddrp(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut header = [0u8; 14];
    r.read_exact(&mut header)
        .map_err(|_| Error::format(path, "file too short for DDRP header"))?;
    if header[..4] != DDRP_MAGIC {
        return Err(Error::format(path, "bad magic bytes, not a DDRP file"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != DDRP_VERSION {
        return Err(Error::format(path, format!("unsupported DDRP version {version}")));
    }
    let rows = u32::from_le_bytes([header[6], header[7], header[8], header[9]]) as usize;
    let cols = u32::from_le_bytes([header[10], header[11], header[12], header[13]]) as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::format(path, "DDRP matrix has a zero dimension"));
    }
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::format(path, "DDRP shape overflows"))?;
    let mut payload = Vec::with_capacity(expected);
    r.read_to_end(&mut payload).map_err(|e| Error::io(path, e))?;
    if payload.len() != expected {
        return Err(Error::format(
            path,
            format!("payload is {} bytes, shape {rows}x{cols} needs {expected}", payload.len()),
        ));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]));
    Ok(DMatrix::from_row_iterator(rows, cols, values))
}

/// Reads a matrix, dispatching on the file extension (`.csv` or `.ddrp`).
pub fn read_matrix_auto(path: &Path) -> Result<DMatrix<f64>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => read_matrix_csv(path),
        Some(ext) if ext.eq_ignore_ascii_case("ddrp") => read_matrix_ddrp(path),
        _ => Err(Error::format(path, "unknown matrix extension, expected .csv or .ddrp")),
    }
}
