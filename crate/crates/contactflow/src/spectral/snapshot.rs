//! Raw field snapshot format.
//!
//! Layout: one ASCII header line
//! `CEA1 <ndim> <n1> [n2] [n3] <L1> [L2] [L3]\n`
//! followed by the field values as row-major little-endian 64-bit floats.
//! Periods are printed with 17 significant digits so a save/load round trip
//! is bit exact.

use super::{Grid, ScalarField};
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &str = "CEA1";

pub fn write_field<W: Write>(mut w: W, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    let mut header = format!("{MAGIC} {}", grid.ndim());
    for &n in grid.dims() {
        header.push_str(&format!(" {n}"));
    }
    for &l in grid.lengths() {
        header.push_str(&format!(" {l:.16e}"));
    }
    header.push('\n');
    w.write_all(header.as_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<ScalarField> {
    // Read the header byte-by-byte up to the newline; the payload is binary.
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        r.read_exact(&mut byte)
            .map_err(|_| Error::SnapshotFormat("truncated header".into()))?;
        if byte[0] == b'\n' {
            break;
        }
        if header.len() > 256 {
            return Err(Error::SnapshotFormat("header too long".into()));
        }
        header.push(byte[0]);
    }
    let header = String::from_utf8(header)
        .map_err(|_| Error::SnapshotFormat("header is not UTF-8".into()))?;
    let mut tok = header.split_whitespace();
    match tok.next() {
        Some(MAGIC) => {}
        other => {
            return Err(Error::SnapshotFormat(format!(
                "bad magic {:?}, expected {MAGIC}",
                other.unwrap_or("")
            )))
        }
    }
    let ndim: usize = tok
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::SnapshotFormat("missing ndim".into()))?;
    if !(1..=3).contains(&ndim) {
        return Err(Error::SnapshotFormat(format!("ndim {ndim} out of range")));
    }
    let mut dims = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        dims.push(
            tok.next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::SnapshotFormat("missing axis size".into()))?,
        );
    }
    let mut lengths = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        lengths.push(
            tok.next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::SnapshotFormat("missing axis period".into()))?,
        );
    }
    if tok.next().is_some() {
        return Err(Error::SnapshotFormat("trailing tokens in header".into()));
    }
    let grid = Grid::new(&dims, &lengths)?;
    let total = grid.total();
    let mut buf = vec![0u8; total * 8];
    r.read_exact(&mut buf)
        .map_err(|_| Error::SnapshotFormat("truncated payload".into()))?;
    let values: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(&grid, values)
}

pub fn save_field(path: &Path, field: &ScalarField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load_field(path: &Path) -> Result<ScalarField> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let grid = Grid::new(&[16, 8], &[std::f64::consts::TAU, 3.7]).unwrap();
        let f = ScalarField::random_trig(&grid, 3, 1.25, 5);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let g = read_field(buf.as_slice()).unwrap();
        assert_eq!(g.grid(), f.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn header_shape() {
        let grid = Grid::uniform(&[8]).unwrap();
        let f = ScalarField::constant(&grid, 1.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let header = std::str::from_utf8(&buf[..nl]).unwrap();
        assert!(header.starts_with("CEA1 1 8 "));
        assert_eq!(buf.len() - nl - 1, 8 * 8);
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(read_field(&b"XXX 1 8 1.0\n"[..]).is_err());
        assert!(read_field(&b"CEA1 1 8 6.28\x00\x00"[..]).is_err());
        // truncated payload
        let grid = Grid::uniform(&[8]).unwrap();
        let f = ScalarField::constant(&grid, 1.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            read_field(buf.as_slice()),
            Err(Error::SnapshotFormat(_))
        ));
    }
}
