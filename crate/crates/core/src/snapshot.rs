//! Bit-exact binary snapshot format for fields.
//!
//! Layout (all little-endian):
//!
//! ```text
//!   bytes 0..8    magic "PCNLS1\0\0"
//!   u32           dimension (1 or 2)
//!   u32           points per axis
//!   f64           half width
//!   f64           time stamp
//!   N^d x (f64, f64)   samples (re, im), row-major
//!   u64           FNV-1a hash of every preceding byte
//! ```
//!
//! Reading re-validates the header invariants and the checksum, so a stored
//! field round-trips bit for bit or fails loudly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::Grid;

const MAGIC: &[u8; 8] = b"PCNLS1\0\0";
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Serialize a field to the snapshot byte layout.
pub fn snapshot_bytes(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(32 + 16 * field.samples().len() + 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&grid.dim().to_le_bytes());
    out.extend_from_slice(&grid.points_per_axis().to_le_bytes());
    out.extend_from_slice(&grid.half_width().to_le_bytes());
    out.extend_from_slice(&field.time().to_le_bytes());
    for z in field.samples() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    let h = fnv1a(&out);
    out.extend_from_slice(&h.to_le_bytes());
    out
}

/// Parse the snapshot byte layout back into a field.
pub fn field_from_snapshot_bytes(bytes: &[u8]) -> Result<Field> {
    const HEADER: usize = 8 + 4 + 4 + 8 + 8;
    if bytes.len() < HEADER + 8 {
        return Err(CoreError::SnapshotTruncated { want: HEADER + 8, got: bytes.len() });
    }
    if &bytes[0..8] != MAGIC {
        return Err(CoreError::SnapshotBadMagic);
    }
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let points = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let half_width = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let time = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let grid = Grid::new(dim, points, half_width)?;
    let want = HEADER + 16 * grid.total_points() + 8;
    if bytes.len() != want {
        return Err(CoreError::SnapshotTruncated { want, got: bytes.len() });
    }
    let stored = u64::from_le_bytes(bytes[want - 8..].try_into().unwrap());
    let computed = fnv1a(&bytes[..want - 8]);
    if stored != computed {
        return Err(CoreError::SnapshotChecksum { stored, computed });
    }
    let mut samples = Vec::with_capacity(grid.total_points());
    let mut off = HEADER;
    for _ in 0..grid.total_points() {
        let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
        samples.push(Complex64::new(re, im));
        off += 16;
    }
    Field::new(grid, time, samples)
}

/// Write a field to disk in the snapshot format.
pub fn write_snapshot(field: &Field, path: &Path) -> Result<()> {
    fs::write(path, snapshot_bytes(field))?;
    Ok(())
}

/// Read a field back from disk, validating header and checksum.
pub fn read_snapshot(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    field_from_snapshot_bytes(&bytes)
}
