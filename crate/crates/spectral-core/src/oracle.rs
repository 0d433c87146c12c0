//! Direct-summation references for testing the fast paths.
//!
//! Everything here is deliberately O(n^4) and guarded to small grids.

use num_complex::Complex64;

use crate::error::SpectralError;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::sum;

pub const MAX_ORACLE_POINTS: usize = 64;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn guard(grid: Grid) -> Result<(), SpectralError> {
    if grid.n() > MAX_ORACLE_POINTS {
        return Err(SpectralError::GridSize { n: grid.n() });
    }
    Ok(())
}

/// Fourier coefficient by direct quadrature, no FFT involved.
pub fn dft_coefficient(f: &ScalarField, k1: i64, k2: i64) -> Complex64 {
    let grid = f.grid();
    let n = grid.n();
    let mut re = Vec::with_capacity(n * n);
    let mut im = Vec::with_capacity(n * n);
    for i2 in 0..n {
        for i1 in 0..n {
            let (x1, x2) = grid.point(i1, i2);
            let phase = -TWO_PI * (k1 as f64 * x1 + k2 as f64 * x2);
            let v = f.at(i1, i2);
            re.push(v * phase.cos());
            im.push(v * phase.sin());
        }
    }
    let scale = 1.0 / (n * n) as f64;
    Complex64::new(sum::sum(&re) * scale, sum::sum(&im) * scale)
}

/// Dealiased product by direct truncated convolution of direct DFT
/// coefficients, evaluated by direct mode summation.
pub fn convolution_product(
    f: &ScalarField,
    g: &ScalarField,
) -> Result<ScalarField, SpectralError> {
    f.grid().same_as(&g.grid())?;
    guard(f.grid())?;
    let grid = f.grid();
    let c = grid.dealias_cutoff() as i64;

    let side = (2 * c + 1) as usize;
    let coeff_index = |k1: i64, k2: i64| ((k2 + c) as usize) * side + (k1 + c) as usize;

    let mut fc = vec![Complex64::new(0.0, 0.0); side * side];
    let mut gc = fc.clone();
    for k2 in -c..=c {
        for k1 in -c..=c {
            fc[coeff_index(k1, k2)] = dft_coefficient(f, k1, k2);
            gc[coeff_index(k1, k2)] = dft_coefficient(g, k1, k2);
        }
    }

    let mut pc = vec![Complex64::new(0.0, 0.0); side * side];
    for k2 in -c..=c {
        for k1 in -c..=c {
            let mut acc = Complex64::new(0.0, 0.0);
            for p2 in -c..=c {
                for p1 in -c..=c {
                    let (q1, q2) = (k1 - p1, k2 - p2);
                    if q1.abs() <= c && q2.abs() <= c {
                        acc += fc[coeff_index(p1, p2)] * gc[coeff_index(q1, q2)];
                    }
                }
            }
            pc[coeff_index(k1, k2)] = acc;
        }
    }

    let n = grid.n();
    let mut values = vec![0.0f64; n * n];
    for i2 in 0..n {
        for i1 in 0..n {
            let (x1, x2) = grid.point(i1, i2);
            let mut acc = 0.0;
            for k2 in -c..=c {
                for k1 in -c..=c {
                    let phase = TWO_PI * (k1 as f64 * x1 + k2 as f64 * x2);
                    let coeff = pc[coeff_index(k1, k2)];
                    acc += coeff.re * phase.cos() - coeff.im * phase.sin();
                }
            }
            values[grid.index(i1, i2)] = acc;
        }
    }
    ScalarField::from_values(grid, values)
}

/// Direct evaluation of a single-mode pair c e^{2 pi i k . x} + conjugate.
pub fn real_wave(grid: Grid, k1: i64, k2: i64, coeff: Complex64) -> ScalarField {
    ScalarField::from_fn(grid, |x1, x2| {
        let phase = TWO_PI * (k1 as f64 * x1 + k2 as f64 * x2);
        2.0 * (coeff.re * phase.cos() - coeff.im * phase.sin())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn direct_dft_matches_fft() {
        let g = Grid::new(16).unwrap();
        let f = ScalarField::from_fn(g, |x1, x2| {
            0.7 + (2.0 * PI * (3.0 * x1 - x2)).sin() + 0.2 * (2.0 * PI * 2.0 * x2).cos()
        });
        let s = fft::forward(&f);
        for (k1, k2) in [(0, 0), (3, -1), (-3, 1), (0, 2), (5, 5)] {
            let direct = dft_coefficient(&f, k1, k2);
            let fast = s.coeff(k1, k2);
            assert!((direct - fast).norm() < 1e-13, "mode ({k1},{k2})");
        }
    }

    #[test]
    fn oracle_rejects_large_grids() {
        let g = Grid::new(128).unwrap();
        let f = ScalarField::zeros(g);
        assert!(convolution_product(&f, &f).is_err());
    }

    #[test]
    fn wave_product_closed_form() {
        let g = Grid::new(32).unwrap();
        // sin(2 pi a x) sin(2 pi b x) = (cos(2 pi (a-b) x) - cos(2 pi (a+b) x)) / 2
        let f = ScalarField::from_fn(g, |x1, _| (2.0 * PI * 3.0 * x1).sin());
        let h = ScalarField::from_fn(g, |x1, _| (2.0 * PI * 5.0 * x1).sin());
        let p = convolution_product(&f, &h).unwrap();
        let oracle = ScalarField::from_fn(g, |x1, _| {
            0.5 * ((2.0 * PI * 2.0 * x1).cos() - (2.0 * PI * 8.0 * x1).cos())
        });
        assert!(p.sup_distance(&oracle) < 1e-12);
    }

    #[test]
    fn product_drops_out_of_band_output() {
        let g = Grid::new(32).unwrap();
        // cutoff is 10; 7 + 7 = 14 falls outside and must vanish.
        let f = ScalarField::from_fn(g, |x1, _| (2.0 * PI * 7.0 * x1).sin());
        let p = convolution_product(&f, &f).unwrap();
        let oracle = ScalarField::from_fn(g, |_, _| 0.5);
        assert!(p.sup_distance(&oracle) < 1e-12);
    }
}
