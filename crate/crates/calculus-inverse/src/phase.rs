//! Phase maps: volume-preserving torus transformations written as the
//! identity plus a periodic displacement, with the pointwise matrix algebra
//! the oscillatory machinery needs.

use spectral_core::ops;
use spectral_core::{Axis, Grid, ScalarField, VectorField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// General (non-symmetric) 2x2 matrix field; entry m_rc is row r, column c.
#[derive(Debug, Clone)]
pub struct MatrixField {
    pub m11: ScalarField,
    pub m12: ScalarField,
    pub m21: ScalarField,
    pub m22: ScalarField,
}

impl MatrixField {
    pub fn grid(&self) -> Grid {
        self.m11.grid()
    }

    pub fn det(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid());
        let (a, b, c, d) = (
            self.m11.values(),
            self.m12.values(),
            self.m21.values(),
            self.m22.values(),
        );
        for (i, v) in out.values_mut().iter_mut().enumerate() {
            *v = a[i] * d[i] - b[i] * c[i];
        }
        out
    }

    /// Pointwise inverse; entries must form an invertible matrix everywhere.
    pub fn inverse(&self) -> MatrixField {
        let grid = self.grid();
        let mut out = MatrixField {
            m11: ScalarField::zeros(grid),
            m12: ScalarField::zeros(grid),
            m21: ScalarField::zeros(grid),
            m22: ScalarField::zeros(grid),
        };
        let (a, b, c, d) = (
            self.m11.values(),
            self.m12.values(),
            self.m21.values(),
            self.m22.values(),
        );
        for i in 0..grid.points() {
            let det = a[i] * d[i] - b[i] * c[i];
            out.m11.values_mut()[i] = d[i] / det;
            out.m12.values_mut()[i] = -b[i] / det;
            out.m21.values_mut()[i] = -c[i] / det;
            out.m22.values_mut()[i] = a[i] / det;
        }
        out
    }

    /// Sup distance to the identity matrix.
    pub fn distortion(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.grid().points() {
            worst = worst
                .max((self.m11.values()[i] - 1.0).abs())
                .max(self.m12.values()[i].abs())
                .max(self.m21.values()[i].abs())
                .max((self.m22.values()[i] - 1.0).abs());
        }
        worst
    }
}

/// Map x -> x + displacement(x) with periodic displacement.
#[derive(Debug, Clone)]
pub struct PhaseMap {
    displacement: VectorField,
}

impl PhaseMap {
    pub fn new(displacement: VectorField) -> Self {
        PhaseMap { displacement }
    }

    pub fn identity(grid: Grid) -> Self {
        PhaseMap {
            displacement: VectorField::zeros(grid),
        }
    }

    pub fn grid(&self) -> Grid {
        self.displacement.grid()
    }

    pub fn displacement(&self) -> &VectorField {
        &self.displacement
    }

    /// Gradient matrix: entry (l, j) is the j-derivative of component l.
    pub fn gradient(&self) -> MatrixField {
        let d = &self.displacement;
        let mut m11 = ops::derivative(&d.x, Axis::X1, 1).expect("order 1");
        let m12 = ops::derivative(&d.x, Axis::X2, 1).expect("order 1");
        let m21 = ops::derivative(&d.y, Axis::X1, 1).expect("order 1");
        let mut m22 = ops::derivative(&d.y, Axis::X2, 1).expect("order 1");
        for v in m11.values_mut() {
            *v += 1.0;
        }
        for v in m22.values_mut() {
            *v += 1.0;
        }
        MatrixField { m11, m12, m21, m22 }
    }

    /// Sup distance of the gradient from the identity.
    pub fn distortion(&self) -> f64 {
        self.gradient().distortion()
    }

    /// Sup of |det(gradient) - 1|: volume-preservation defect.
    pub fn volume_defect(&self) -> f64 {
        let det = self.gradient().det();
        det.values()
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// cos and sin of the phase 2 pi lambda k . Phi(x) at every grid point.
    ///
    /// The lattice part of the phase is reduced modulo one in exact integer
    /// arithmetic before any trig call.
    pub fn carrier(&self, k: (i64, i64), lambda: u32) -> (ScalarField, ScalarField) {
        let grid = self.grid();
        let n = grid.n();
        let mut cos_f = ScalarField::zeros(grid);
        let mut sin_f = ScalarField::zeros(grid);
        let dx = self.displacement.x.values();
        let dy = self.displacement.y.values();
        let lam = lambda as i64;
        for i2 in 0..n {
            for i1 in 0..n {
                let idx = grid.index(i1, i2);
                let lattice = (lam * (k.0 * i1 as i64 + k.1 * i2 as i64)).rem_euclid(n as i64);
                let theta = TWO_PI * (lattice as f64) / n as f64
                    + TWO_PI * lambda as f64 * (k.0 as f64 * dx[idx] + k.1 as f64 * dy[idx]);
                cos_f.values_mut()[idx] = theta.cos();
                sin_f.values_mut()[idx] = theta.sin();
            }
        }
        (cos_f, sin_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn identity_map_has_clean_algebra() {
        let g = Grid::new(32).unwrap();
        let map = PhaseMap::identity(g);
        assert_eq!(map.distortion(), 0.0);
        assert_eq!(map.volume_defect(), 0.0);
        let inv = map.gradient().inverse();
        assert_eq!(inv.distortion(), 0.0);
    }

    #[test]
    fn carrier_at_identity_is_plane_wave() {
        let g = Grid::new(64).unwrap();
        let map = PhaseMap::identity(g);
        let (c, s) = map.carrier((2, -1), 4);
        let oracle_c = ScalarField::from_fn(g, |x1, x2| {
            (TWO_PI * 4.0 * (2.0 * x1 - x2)).cos()
        });
        let oracle_s = ScalarField::from_fn(g, |x1, x2| {
            (TWO_PI * 4.0 * (2.0 * x1 - x2)).sin()
        });
        assert!(c.sup_distance(&oracle_c) <= 1e-13);
        assert!(s.sup_distance(&oracle_s) <= 1e-13);
    }

    #[test]
    fn gradient_inverse_is_pointwise_inverse() {
        let g = Grid::new(64).unwrap();
        let disp = VectorField::from_fn(g, |x1, x2| {
            (
                0.02 * (2.0 * PI * x2).sin(),
                0.02 * (2.0 * PI * (x1 + x2)).cos(),
            )
        });
        let map = PhaseMap::new(disp);
        let m = map.gradient();
        let a = m.inverse();
        // m * a = Id pointwise to machine precision.
        for i in 0..g.points() {
            let p11 = m.m11.values()[i] * a.m11.values()[i] + m.m12.values()[i] * a.m21.values()[i];
            let p12 = m.m11.values()[i] * a.m12.values()[i] + m.m12.values()[i] * a.m22.values()[i];
            assert!((p11 - 1.0).abs() < 1e-14);
            assert!(p12.abs() < 1e-14);
        }
    }

    #[test]
    fn shear_map_volume_preserving() {
        let g = Grid::new(32).unwrap();
        // x -> x + f(x2) e1 is exactly volume preserving.
        let disp = VectorField::from_fn(g, |_, x2| (0.1 * (2.0 * PI * x2).sin(), 0.0));
        let map = PhaseMap::new(disp);
        assert!(map.volume_defect() <= 1e-13);
        assert!(map.distortion() > 0.1);
    }
}
