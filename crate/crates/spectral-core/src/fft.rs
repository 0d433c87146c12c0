//! Two-dimensional transforms between sample values and Fourier coefficients.
//!
//! Conventions: a field is f(x) = sum_k c_k e^{2 pi i k.x} with x in [0,1)^2.
//! [`forward`] returns the coefficients c_k (forward DFT scaled by 1/n^2),
//! which is exact for band-limited samples; [`inverse`] evaluates the mode sum
//! back on the grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::ScalarField;
use crate::grid::Grid;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Fourier coefficients of a field, in FFT bin layout (`bins[i2*n + i1]`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Spectrum {
            grid,
            bins: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    #[inline]
    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    /// Coefficient of the mode with signed frequencies (k1, k2).
    #[inline]
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        let i1 = self.grid.bin(k1);
        let i2 = self.grid.bin(k2);
        self.bins[i2 * self.grid.n() + i1]
    }

    #[inline]
    pub fn coeff_mut(&mut self, k1: i64, k2: i64) -> &mut Complex64 {
        let i1 = self.grid.bin(k1);
        let i2 = self.grid.bin(k2);
        &mut self.bins[i2 * self.grid.n() + i1]
    }

    /// Applies `f(k1, k2, c)` to every bin.
    pub fn map_modes(&mut self, mut f: impl FnMut(i64, i64, Complex64) -> Complex64) {
        let n = self.grid.n();
        for i2 in 0..n {
            let k2 = self.grid.freq(i2);
            for i1 in 0..n {
                let k1 = self.grid.freq(i1);
                let c = self.bins[i2 * n + i1];
                self.bins[i2 * n + i1] = f(k1, k2, c);
            }
        }
    }

    /// Zeroes every mode outside the dealias band.
    pub fn truncate(&mut self) {
        let g = self.grid;
        self.map_modes(|k1, k2, c| if g.keeps(k1, k2) { c } else { Complex64::new(0.0, 0.0) });
    }

    /// Largest |k| per axis among modes whose modulus exceeds the threshold.
    pub fn band_limit(&self, threshold: f64) -> i64 {
        let n = self.grid.n();
        let mut limit = 0i64;
        for i2 in 0..n {
            let k2 = self.grid.freq(i2);
            for i1 in 0..n {
                let k1 = self.grid.freq(i1);
                if self.bins[i2 * n + i1].norm() > threshold {
                    limit = limit.max(k1.abs()).max(k2.abs());
                }
            }
        }
        limit
    }

    /// Sum of mode moduli: an upper bound for the sup norm.
    pub fn modulus_sum(&self) -> f64 {
        let parts: Vec<f64> = self.bins.iter().map(|c| c.norm()).collect();
        crate::sum::sum(&parts)
    }

    /// Max modulus over modes outside the dealias band.
    pub fn tail_max(&self) -> f64 {
        let n = self.grid.n();
        let mut m = 0.0f64;
        for i2 in 0..n {
            let k2 = self.grid.freq(i2);
            for i1 in 0..n {
                let k1 = self.grid.freq(i1);
                if !self.grid.keeps(k1, k2) {
                    m = m.max(self.bins[i2 * n + i1].norm());
                }
            }
        }
        m
    }
}

fn transform_2d(grid: Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Rows.
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // Columns, via transpose buffers.
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for i1 in 0..n {
        for i2 in 0..n {
            col[i2] = data[i2 * n + i1];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for i2 in 0..n {
            data[i2 * n + i1] = col[i2];
        }
    }
}

/// Fourier coefficients of `f`.
pub fn forward(f: &ScalarField) -> Spectrum {
    let grid = f.grid();
    let mut bins: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(grid, &mut bins, false);
    let scale = 1.0 / grid.points() as f64;
    for c in &mut bins {
        *c *= scale;
    }
    Spectrum { grid, bins }
}

/// Evaluates the mode sum on the grid, discarding the (tiny) imaginary part.
pub fn inverse(s: &Spectrum) -> ScalarField {
    let mut bins = s.bins.clone();
    transform_2d(s.grid, &mut bins, true);
    ScalarField::from_values(s.grid, bins.into_iter().map(|c| c.re).collect())
        .expect("length preserved by transform")
}

/// Largest imaginary residue the inverse transform would discard; a real
/// spectrum (conjugate-symmetric) keeps this at rounding level.
pub fn imag_residue(s: &Spectrum) -> f64 {
    let mut bins = s.bins.clone();
    transform_2d(s.grid, &mut bins, true);
    bins.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}
