use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {n} not supported: need a power of two >= 16")]
    GridSize { n: usize },

    #[error("fields live on different grids ({a} vs {b} points per axis)")]
    GridMismatch { a: usize, b: usize },

    #[error("derivative order {order} exceeds the cap of {max}")]
    DerivativeOrder { order: u32, max: u32 },

    #[error("input must be mean-free: |mean| = {mean:.3e} exceeds {tol:.1e}")]
    NotMeanFree { mean: f64, tol: f64 },

    #[error("snapshot {path}: {reason}")]
    SnapshotFormat { path: PathBuf, reason: String },

    #[error("snapshot io {path}")]
    SnapshotIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
