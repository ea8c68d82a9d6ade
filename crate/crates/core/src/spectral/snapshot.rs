//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      8 bytes  "NSK41FLD"
//! version    u32      1
//! N          u32
//! L_box      f64
//! ell0       f64
//! N^3 modes  3 x (re f64, im f64) per mode
//! ```
//!
//! Modes are written in row-major order of the signed lattice triple
//! `(k1, k2, k3)`, each axis running from `-N/2` to `N/2 - 1`; the three
//! components of a mode are adjacent.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 8] = b"NSK41FLD";
pub const FORMAT_VERSION: u32 = 1;

/// Grid index of the `pos`-th signed wavenumber in snapshot order.
fn axis_index(n: usize, pos: usize) -> usize {
    let k = pos as i64 - (n / 2) as i64;
    k.rem_euclid(n as i64) as usize
}

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralField, ell0: f64) -> Result<()> {
    let g = field.grid;
    let n = g.n();
    let mut buf = Vec::with_capacity(32 + g.len() * 48);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&g.box_half_side.to_le_bytes());
    buf.extend_from_slice(&ell0.to_le_bytes());
    for p0 in 0..n {
        for p1 in 0..n {
            for p2 in 0..n {
                let idx = g.flat([axis_index(n, p0), axis_index(n, p1), axis_index(n, p2)]);
                for c in 0..3 {
                    let z = field.comps[c][idx];
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn take<const K: usize>(bytes: &[u8], at: &mut usize) -> Result<[u8; K]> {
    let end = *at + K;
    let slice = bytes
        .get(*at..end)
        .ok_or_else(|| LabError::Snapshot("truncated snapshot".into()))?;
    *at = end;
    Ok(slice.try_into().expect("slice length checked"))
}

/// Reads a snapshot; returns the field (default dealias fraction) and `ell0`.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<(SpectralField, f64)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut at = 0;
    let magic: [u8; 8] = take(&bytes, &mut at)?;
    if &magic != MAGIC {
        return Err(LabError::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&bytes, &mut at)?);
    if version != FORMAT_VERSION {
        return Err(LabError::Snapshot(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(take(&bytes, &mut at)?) as usize;
    let box_half_side = f64::from_le_bytes(take(&bytes, &mut at)?);
    let ell0 = f64::from_le_bytes(take(&bytes, &mut at)?);
    let grid = GridSpec::new(box_half_side, n).map_err(|e| LabError::Snapshot(e.to_string()))?;
    let expected = at + grid.len() * 48;
    if bytes.len() != expected {
        return Err(LabError::Snapshot(format!(
            "payload length {} does not match N = {n} (expected {expected})",
            bytes.len()
        )));
    }
    let mut field = SpectralField::zeros(grid);
    for p0 in 0..n {
        for p1 in 0..n {
            for p2 in 0..n {
                let idx = grid.flat([axis_index(n, p0), axis_index(n, p1), axis_index(n, p2)]);
                for c in 0..3 {
                    let re = f64::from_le_bytes(take(&bytes, &mut at)?);
                    let im = f64::from_le_bytes(take(&bytes, &mut at)?);
                    field.comps[c][idx] = Complex64::new(re, im);
                }
            }
        }
    }
    Ok((field, ell0))
}

pub fn save_snapshot(path: &Path, field: &SpectralField, ell0: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_snapshot(std::io::BufWriter::new(file), field, ell0)
}

pub fn load_snapshot(path: &Path) -> Result<(SpectralField, f64)> {
    read_snapshot(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = GridSpec::new(2.0, 8).unwrap();
        let mut f = SpectralField::zeros(g);
        // k = (-4, -4, -4) is the first mode written.
        let first = g.index_of([-4, -4, -4]).unwrap();
        f.comps[1][first] = Complex64::new(3.0, -1.0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.5).unwrap();
        assert_eq!(&buf[0..8], b"NSK41FLD");
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 2.0);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), 0.5);
        assert_eq!(f64::from_le_bytes(buf[48..56].try_into().unwrap()), 3.0);
        assert_eq!(f64::from_le_bytes(buf[56..64].try_into().unwrap()), -1.0);
        assert_eq!(buf.len(), 32 + 512 * 48);
        let (back, ell0) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back, f);
        assert_eq!(ell0, 0.5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_snapshot(&b"NOTAFILE"[..]).is_err());
        let g = GridSpec::new(2.0, 8).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &SpectralField::zeros(g), 1.0).unwrap();
        buf.pop();
        assert!(read_snapshot(&buf[..]).is_err());
    }
}
