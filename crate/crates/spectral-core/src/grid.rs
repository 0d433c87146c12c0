//! Uniform N x N sampling of the unit torus with dealiasing bookkeeping.

use crate::error::SpectralError;

/// Uniform grid on [0,1)^2 with `n` points per axis.
///
/// The period is fixed to 1, so FFT bin `i` carries the integer frequency
/// returned by [`Grid::freq`] and fields are sums of `e^{2 pi i k.x}` modes.
/// Nonlinear products are truncated with the 2/3 rule: modes with either
/// component above [`Grid::dealias_cutoff`] are dropped, which keeps products
/// of retained modes alias-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const MIN_POINTS_PER_AXIS: usize = 16;

    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < Self::MIN_POINTS_PER_AXIS || !n.is_power_of_two() {
            return Err(SpectralError::GridSize { n });
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of sample points.
    #[inline]
    pub fn points(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Signed frequency carried by FFT bin `i` along one axis.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        debug_assert!(i < self.n);
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT bin holding signed frequency `k` (requires |k| <= n/2).
    #[inline]
    pub fn bin(&self, k: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k.abs() <= n / 2);
        k.rem_euclid(n) as usize
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Largest mode retained by the 2/3 rule (per axis).
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Whether mode (k1, k2) survives dealiasing.
    #[inline]
    pub fn keeps(&self, k1: i64, k2: i64) -> bool {
        let c = self.dealias_cutoff();
        k1.abs() <= c && k2.abs() <= c
    }

    /// Coordinates of the sample with column index i1, row index i2.
    #[inline]
    pub fn point(&self, i1: usize, i2: usize) -> (f64, f64) {
        let h = self.spacing();
        (i1 as f64 * h, i2 as f64 * h)
    }

    /// Row-major storage index of sample (i1, i2).
    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i2 * self.n + i1
    }

    pub fn same_as(&self, other: &Grid) -> Result<(), SpectralError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch {
                a: self.n,
                b: other.n,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8).is_err());
        assert!(Grid::new(48).is_err());
        assert!(Grid::new(0).is_err());
        assert!(Grid::new(16).is_ok());
        assert!(Grid::new(256).is_ok());
    }

    #[test]
    fn freq_bin_round_trip() {
        let g = Grid::new(32).unwrap();
        for i in 0..32 {
            let k = g.freq(i);
            assert!(k.abs() <= g.nyquist());
            if k != g.nyquist() {
                assert_eq!(g.bin(k), i);
            }
        }
        assert_eq!(g.freq(0), 0);
        assert_eq!(g.freq(1), 1);
        assert_eq!(g.freq(31), -1);
        assert_eq!(g.freq(16), 16); // nyquist kept positive here
    }

    #[test]
    fn dealias_cutoff_below_nyquist() {
        for n in [16usize, 32, 64, 128, 256, 512] {
            let g = Grid::new(n).unwrap();
            assert!(g.dealias_cutoff() < g.nyquist());
            // 2/3 rule: products of retained modes cannot alias back into
            // the retained band.
            assert!(2 * g.dealias_cutoff() - (n as i64) < -g.dealias_cutoff());
        }
    }
}
