//! Binary field snapshots.
//!
//! Layout, little-endian throughout:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `CVPL` |
//! | 4 | format version (u32) |
//! | 12 | nx, ny, nz (u32 each) |
//! | 8 | time (f64) |
//! | 4 | field count (u32, always 5) |
//! | 8 n per field | rho, rho u, rho v, rho w, rho E, x fastest |

use crate::error::{Error, Result};
use crate::run::write_atomic;
use cvples_core::{ConservedState, Grid, ScalarField};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"CVPL";
pub const VERSION: u32 = 1;
pub const FIELD_COUNT: u32 = 5;
const HEADER_LEN: usize = 4 + 4 + 12 + 8 + 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: ConservedState,
}

pub fn encode_snapshot(state: &ConservedState, time: f64) -> Vec<u8> {
    let g = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 40 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in g.shape() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&time.to_le_bytes());
    out.extend_from_slice(&FIELD_COUNT.to_le_bytes());
    for f in state.fields() {
        for v in f.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decodes a snapshot onto `grid`, whose shape must match the header.
pub fn decode_snapshot(bytes: &[u8], grid: &Grid, path: &Path) -> Result<Snapshot> {
    if bytes.len() < 8 {
        return Err(if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            Error::BadMagic(path.into())
        } else {
            Error::TruncatedFile(path.into())
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic(path.into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::VersionMismatch {
            path: path.into(),
            found: version,
            expected: VERSION,
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile(path.into()));
    }
    let dims = [u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize];
    if dims != grid.shape() {
        return Err(Error::DimensionMismatch {
            path: path.into(),
            found: dims,
            expected: grid.shape(),
        });
    }
    let time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let count = u32_at(28);
    let n = grid.len();
    if count != FIELD_COUNT || bytes.len() != HEADER_LEN + 8 * n * FIELD_COUNT as usize {
        return Err(Error::TruncatedFile(path.into()));
    }
    let mut fields = Vec::with_capacity(5);
    for f in 0..FIELD_COUNT as usize {
        let start = HEADER_LEN + 8 * n * f;
        let data = bytes[start..start + 8 * n]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        fields.push(ScalarField::from_vec(*grid, data)?);
    }
    let fields: [ScalarField; 5] = fields.try_into().expect("five fields");
    Ok(Snapshot {
        time,
        state: ConservedState::from_fields(fields)?,
    })
}

pub fn write_snapshot(state: &ConservedState, time: f64, path: &Path) -> Result<()> {
    write_atomic(path, &encode_snapshot(state, time))
}

pub fn read_snapshot(path: &Path, grid: &Grid) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes, grid, path)
}
