use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error("input is not mean-free: |mean| = {mean:e} exceeds {tol:e}")]
    NotMeanFree { mean: f64, tol: f64 },

    #[error("phase map too far from the identity: |grad - Id| = {measured} > {limit}")]
    PhaseMapDistortion { measured: f64, limit: f64 },

    #[error("oscillation frequency {frequency} reaches the grid Nyquist limit {nyquist}")]
    FrequencyOverflow { frequency: i64, nyquist: i64 },

    #[error("zero wavevector carries no oscillation")]
    ZeroWavevector,

    #[error("iteration depth {depth} outside 1..={max}")]
    DepthRange { depth: usize, max: usize },

    #[error("interpolation budget {budget:e} needs {needed} points per axis, cap is {cap}")]
    BudgetUnreachable { budget: f64, needed: usize, cap: usize },

    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
