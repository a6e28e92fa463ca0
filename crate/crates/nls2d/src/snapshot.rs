//! Flat binary field snapshots for oracle cross-validation.
//!
//! Layout (all little-endian):
//!
//! ```text
//! offset 0   u64  n        nodes per axis (power of two, 8 <= n <= 4096)
//! offset 8   f64  L        box side length (finite, > 0)
//! offset 16  f64  pairs    n^2 (re, im) samples, row-major, x fastest
//! ```
//!
//! Total size is exactly `16 + 16 n^2` bytes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

/// Largest grid a snapshot may carry; bounds decoder allocations.
pub const MAX_SNAPSHOT_N: usize = 4096;

/// Serialize a field to the flat binary layout.
pub fn encode_snapshot(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(16 + 16 * grid.num_points());
    out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn read_f64(bytes: &[u8], offset: usize) -> f64 {
    let mut buf = [0u8; 8];
    buf.copy_from_slice(&bytes[offset..offset + 8]);
    f64::from_le_bytes(buf)
}

/// Decode a field from the flat binary layout, validating the header, the
/// exact payload length, and sample finiteness before any allocation.
pub fn decode_snapshot(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < 16 {
        return Err(Error::SnapshotFormat(format!(
            "truncated header: {} bytes",
            bytes.len()
        )));
    }
    let mut nbuf = [0u8; 8];
    nbuf.copy_from_slice(&bytes[..8]);
    let n_raw = u64::from_le_bytes(nbuf);
    if n_raw > MAX_SNAPSHOT_N as u64 {
        return Err(Error::SnapshotFormat(format!(
            "n = {n_raw} exceeds decoder bound"
        )));
    }
    let n = n_raw as usize;
    let length = read_f64(bytes, 8);
    if !length.is_finite() {
        return Err(Error::SnapshotFormat(format!(
            "non-finite box length {length}"
        )));
    }
    let grid =
        Grid::new(n, length).map_err(|e| Error::SnapshotFormat(format!("bad header: {e}")))?;
    let expected = 16usize + 16 * grid.num_points();
    if bytes.len() != expected {
        return Err(Error::SnapshotFormat(format!(
            "payload length {} does not match n = {n} (expected {expected})",
            bytes.len()
        )));
    }
    let mut values = Vec::with_capacity(grid.num_points());
    for i in 0..grid.num_points() {
        let re = read_f64(bytes, 16 + 16 * i);
        let im = read_f64(bytes, 24 + 16 * i);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::SnapshotFormat(format!(
                "non-finite sample at index {i}"
            )));
        }
        values.push(Complex64::new(re, im));
    }
    Ok(Field::new(grid, values))
}

/// Write a snapshot file.
pub fn write_snapshot(field: &Field, path: &std::path::Path) -> std::io::Result<()> {
    std::fs::write(path, encode_snapshot(field))
}

/// Read a snapshot file.
pub fn read_snapshot(path: &std::path::Path) -> Result<Field> {
    let bytes = std::fs::read(path).map_err(|e| Error::SnapshotFormat(format!("io error: {e}")))?;
    decode_snapshot(&bytes)
}
