//! On-disk state snapshots.
//!
//! Layout: magic `OLAB1`, then grid points per axis (u32 LE), component
//! count (u32 LE), stage index (u32 LE), time (f64 LE), then each component
//! as row-major f64 LE.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::SpectralError;
use crate::field::ScalarField;
use crate::grid::Grid;

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"OLAB1";

const MAX_COMPONENTS: u32 = 64;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub stage: u32,
    pub time: f64,
    pub components: Vec<ScalarField>,
}

fn format_err(path: &Path, reason: impl Into<String>) -> SpectralError {
    SpectralError::SnapshotFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> SpectralError {
    SpectralError::SnapshotIo {
        path: path.to_path_buf(),
        source,
    }
}

impl Snapshot {
    pub fn new(stage: u32, time: f64, components: Vec<ScalarField>) -> Self {
        Snapshot {
            stage,
            time,
            components,
        }
    }

    pub fn grid(&self) -> Option<Grid> {
        self.components.first().map(|c| c.grid())
    }

    pub fn write(&self, path: &Path) -> Result<(), SpectralError> {
        let grid = self
            .grid()
            .ok_or_else(|| format_err(path, "no components"))?;
        for c in &self.components {
            grid.same_as(&c.grid())?;
        }
        if self.components.len() > MAX_COMPONENTS as usize {
            return Err(format_err(path, "too many components"));
        }
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        let mut emit = |buf: &[u8]| w.write_all(buf).map_err(|e| io_err(path, e));
        emit(SNAPSHOT_MAGIC)?;
        emit(&(grid.n() as u32).to_le_bytes())?;
        emit(&(self.components.len() as u32).to_le_bytes())?;
        emit(&self.stage.to_le_bytes())?;
        emit(&self.time.to_le_bytes())?;
        for c in &self.components {
            for v in c.values() {
                emit(&v.to_le_bytes())?;
            }
        }
        w.flush().map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Snapshot, SpectralError> {
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        let mut r = BufReader::new(file);

        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(|e| io_err(path, e))?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(format_err(path, "bad magic"));
        }

        let mut u32buf = [0u8; 4];
        let mut read_u32 = |r: &mut BufReader<File>| -> Result<u32, SpectralError> {
            r.read_exact(&mut u32buf).map_err(|e| io_err(path, e))?;
            Ok(u32::from_le_bytes(u32buf))
        };
        let n = read_u32(&mut r)?;
        let count = read_u32(&mut r)?;
        let stage = read_u32(&mut r)?;

        let mut f64buf = [0u8; 8];
        r.read_exact(&mut f64buf).map_err(|e| io_err(path, e))?;
        let time = f64::from_le_bytes(f64buf);
        if !time.is_finite() {
            return Err(format_err(path, "non-finite time"));
        }

        let grid = Grid::new(n as usize)
            .map_err(|_| format_err(path, format!("unsupported grid size {n}")))?;
        if count == 0 || count > MAX_COMPONENTS {
            return Err(format_err(path, format!("bad component count {count}")));
        }

        let points = grid.points();
        let mut components = Vec::with_capacity(count as usize);
        let mut raw = vec![0u8; points * 8];
        for _ in 0..count {
            r.read_exact(&mut raw)
                .map_err(|_| format_err(path, "truncated component data"))?;
            let mut values = Vec::with_capacity(points);
            for chunk in raw.chunks_exact(8) {
                values.push(f64::from_le_bytes(chunk.try_into().expect("8 bytes")));
            }
            components.push(ScalarField::from_values(grid, values)?);
        }

        let mut trailing = [0u8; 1];
        match r.read(&mut trailing) {
            Ok(0) => {}
            Ok(_) => return Err(format_err(path, "trailing bytes after components")),
            Err(e) => return Err(io_err(path, e)),
        }

        Ok(Snapshot {
            stage,
            time,
            components,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let g = Grid::new(16).unwrap();
        let a = ScalarField::from_fn(g, |x1, x2| x1 + 2.0 * x2);
        let b = ScalarField::from_fn(g, |x1, _| (x1 - 0.5).abs());
        Snapshot::new(3, 0.625, vec![a, b])
    }

    #[test]
    fn round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.olab");
        let snap = sample();
        snap.write(&path).unwrap();
        let back = Snapshot::read(&path).unwrap();
        assert_eq!(back.stage, snap.stage);
        assert_eq!(back.time.to_bits(), snap.time.to_bits());
        assert_eq!(back.components.len(), snap.components.len());
        for (a, b) in back.components.iter().zip(&snap.components) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.olab");
        sample().write(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            Snapshot::read(&path),
            Err(SpectralError::SnapshotFormat { .. })
        ));
    }

    #[test]
    fn rejects_truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.olab");
        sample().write(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(Snapshot::read(&path).is_err());
    }

    #[test]
    fn rejects_trailing_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.olab");
        sample().write(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(Snapshot::read(&path).is_err());
    }
}
