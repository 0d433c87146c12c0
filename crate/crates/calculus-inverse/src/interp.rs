//! Off-grid evaluation of periodic fields.
//!
//! The interpolant refines the field onto a padded spectral grid sized from
//! the requested error budget, then evaluates with 4-point Lagrange cubics
//! per axis. Exact direct Fourier summation is kept alongside as the oracle.

use num_complex::Complex64;

use spectral_core::fft::{self, Spectrum};
use spectral_core::{Grid, ScalarField};

use crate::error::CalculusError;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const MAX_FINE_POINTS: usize = 4096;

/// cubic Lagrange weights on nodes {-1, 0, 1, 2} at offset t in [0, 1).
fn cubic_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -(t3 - 3.0 * t2 + 2.0 * t) / 6.0,
        (t3 - 2.0 * t2 - t + 2.0) / 2.0,
        -(t3 - t2 - 2.0 * t) / 2.0,
        (t3 - t) / 6.0,
    ]
}

#[derive(Debug, Clone)]
pub struct Interpolant {
    fine: Grid,
    values: Vec<f64>,
}

impl Interpolant {
    /// Builds an interpolant whose predicted evaluation error stays below
    /// the budget, refining by spectral zero-padding as needed.
    pub fn with_budget(f: &ScalarField, budget: f64) -> Result<Self, CalculusError> {
        let mut spec = fft::forward(f);
        spec.truncate();

        // Fourth-derivative bound per axis from the spectrum itself.
        let grid = f.grid();
        let mut d4 = 0.0f64;
        let n = grid.n();
        for i2 in 0..n {
            let k2 = grid.freq(i2) as f64;
            for i1 in 0..n {
                let k1 = grid.freq(i1) as f64;
                let w = (TWO_PI * k1).powi(4) + (TWO_PI * k2).powi(4);
                d4 += w * spec.bins()[i2 * n + i1].norm();
            }
        }

        // 4-point cubic error: 9/(16*24) h^4 |f''''| per axis, with a safety
        // factor of two on top of the derivative bound.
        let coef = 2.0 * 9.0 / (16.0 * 24.0);
        let needed = (coef * d4 / budget).powf(0.25);
        let mut m = f.grid().n().max(16);
        while (m as f64) < needed {
            m *= 2;
            if m > MAX_FINE_POINTS {
                return Err(CalculusError::BudgetUnreachable {
                    budget,
                    needed: needed.ceil() as usize,
                    cap: MAX_FINE_POINTS,
                });
            }
        }
        let fine = Grid::new(m)?;
        Ok(Interpolant {
            fine,
            values: upsample(&spec, fine).values().to_vec(),
        })
    }

    pub fn fine_points(&self) -> usize {
        self.fine.n()
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let n = self.fine.n();
        let nf = n as f64;
        let p1 = (x1.rem_euclid(1.0)) * nf;
        let p2 = (x2.rem_euclid(1.0)) * nf;
        let i1 = p1.floor() as usize % n;
        let i2 = p2.floor() as usize % n;
        let w1 = cubic_weights(p1 - p1.floor());
        let w2 = cubic_weights(p2 - p2.floor());
        let mut acc = 0.0;
        for (b, w2b) in w2.iter().enumerate() {
            let row = (i2 + n + b - 1) % n;
            let mut line = 0.0;
            for (a, w1a) in w1.iter().enumerate() {
                let col = (i1 + n + a - 1) % n;
                line += w1a * self.values[row * n + col];
            }
            acc += w2b * line;
        }
        acc
    }
}

/// Zero-padded spectral refinement onto a finer grid.
pub fn upsample(spec: &Spectrum, fine: Grid) -> ScalarField {
    let coarse = spec.grid();
    let mut padded = Spectrum::zeros(fine);
    let c = coarse.dealias_cutoff() as i64;
    for k2 in -c..=c {
        for k1 in -c..=c {
            *padded.coeff_mut(k1, k2) = spec.coeff(k1, k2);
        }
    }
    fft::inverse(&padded)
}

/// Exact evaluation by direct Fourier summation over every mode.
pub fn eval_fourier(spec: &Spectrum, x1: f64, x2: f64) -> f64 {
    let grid = spec.grid();
    let n = grid.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for i2 in 0..n {
        let k2 = grid.freq(i2);
        for i1 in 0..n {
            let k1 = grid.freq(i1);
            let phase = TWO_PI * (k1 as f64 * x1 + k2 as f64 * x2);
            acc += spec.bins()[i2 * n + i1] * Complex64::new(phase.cos(), phase.sin());
        }
    }
    acc.re
}
