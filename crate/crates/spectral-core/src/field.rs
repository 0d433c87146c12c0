//! Real fields on the torus grid: scalars, 2-vectors, symmetric 2x2 tensors.

use crate::error::SpectralError;
use crate::grid::Grid;
use crate::sum;

/// Real samples of a periodic scalar, row-major (`values[i2*n + i1]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.points()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.points() {
            return Err(SpectralError::GridMismatch {
                a: grid.points(),
                b: values.len(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    /// Samples `f(x1, x2)` on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.points());
        for i2 in 0..n {
            for i1 in 0..n {
                let (x1, x2) = grid.point(i1, i2);
                values.push(f(x1, x2));
            }
        }
        ScalarField { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.index(i1, i2)]
    }

    /// Grid quadrature of the field (the mean, since the cell volume is 1/n^2).
    pub fn mean(&self) -> f64 {
        sum::sum(&self.values) / self.grid.points() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// L^2 norm under grid quadrature.
    pub fn l2_norm(&self) -> f64 {
        (sum::sum_by(&self.values, |v| v * v) / self.grid.points() as f64).sqrt()
    }

    /// Quadrature of the pointwise product with another field.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        sum::sum_zip(&self.values, &other.values, |a, b| a * b) / self.grid.points() as f64
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// self += c * other
    pub fn add_scaled(&mut self, other: &ScalarField, c: f64) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// Raw pointwise product (not dealiased; see `ops::product`).
    pub fn pointwise_mul(&self, other: &ScalarField) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Max pointwise difference to another field.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Two scalar components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self, SpectralError> {
        x.grid().same_as(&y.grid())?;
        Ok(VectorField { x, y })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let fx = ScalarField::from_fn(grid, |a, b| f(a, b).0);
        let fy = ScalarField::from_fn(grid, |a, b| f(a, b).1);
        VectorField { x: fx, y: fy }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.x.grid()
    }

    pub fn sup_norm(&self) -> f64 {
        self.x.sup_norm().max(self.y.sup_norm())
    }

    /// L^2 norm of the vector magnitude.
    pub fn l2_norm(&self) -> f64 {
        let gx = self.x.l2_norm();
        let gy = self.y.l2_norm();
        (gx * gx + gy * gy).sqrt()
    }

    pub fn mean(&self) -> (f64, f64) {
        (self.x.mean(), self.y.mean())
    }

    pub fn scale(&mut self, c: f64) {
        self.x.scale(c);
        self.y.scale(c);
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn add_scaled(&mut self, other: &VectorField, c: f64) {
        self.x.add_scaled(&other.x, c);
        self.y.add_scaled(&other.y, c);
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn sup_distance(&self, other: &VectorField) -> f64 {
        self.x.sup_distance(&other.x).max(self.y.sup_distance(&other.y))
    }

    /// Quadrature of the dot product with another vector field.
    pub fn inner(&self, other: &VectorField) -> f64 {
        self.x.inner(&other.x) + self.y.inner(&other.y)
    }

    /// Pointwise multiplication of both components by a scalar weight field.
    pub fn pointwise_scaled(&self, w: &ScalarField) -> VectorField {
        VectorField {
            x: self.x.pointwise_mul(w),
            y: self.y.pointwise_mul(w),
        }
    }
}

/// Symmetric 2x2 tensor field: independent entries xx, xy, yy.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl SymTensorField {
    pub fn zeros(grid: Grid) -> Self {
        SymTensorField {
            xx: ScalarField::zeros(grid),
            xy: ScalarField::zeros(grid),
            yy: ScalarField::zeros(grid),
        }
    }

    pub fn new(xx: ScalarField, xy: ScalarField, yy: ScalarField) -> Result<Self, SpectralError> {
        xx.grid().same_as(&xy.grid())?;
        xx.grid().same_as(&yy.grid())?;
        Ok(SymTensorField { xx, xy, yy })
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.xx.grid()
    }

    pub fn sup_norm(&self) -> f64 {
        self.xx.sup_norm().max(self.xy.sup_norm()).max(self.yy.sup_norm())
    }

    /// Max of |xx + yy| over the grid.
    pub fn trace_sup(&self) -> f64 {
        self.xx
            .values()
            .iter()
            .zip(self.yy.values())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max)
    }

    /// Removes the pointwise trace: G - (tr G / 2) Id.
    pub fn trace_free_part(&self) -> SymTensorField {
        let grid = self.grid();
        let mut xx = ScalarField::zeros(grid);
        let mut yy = ScalarField::zeros(grid);
        for i in 0..grid.points() {
            let half_tr = 0.5 * (self.xx.values()[i] + self.yy.values()[i]);
            xx.values_mut()[i] = self.xx.values()[i] - half_tr;
            yy.values_mut()[i] = self.yy.values()[i] - half_tr;
        }
        SymTensorField {
            xx,
            xy: self.xy.clone(),
            yy,
        }
    }

    /// Pointwise half-trace as a scalar field.
    pub fn half_trace(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid());
        for i in 0..self.grid().points() {
            out.values_mut()[i] = 0.5 * (self.xx.values()[i] + self.yy.values()[i]);
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        self.xx.scale(c);
        self.xy.scale(c);
        self.yy.scale(c);
    }

    pub fn scaled(&self, c: f64) -> SymTensorField {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn add_scaled(&mut self, other: &SymTensorField, c: f64) {
        self.xx.add_scaled(&other.xx, c);
        self.xy.add_scaled(&other.xy, c);
        self.yy.add_scaled(&other.yy, c);
    }

    pub fn add(&self, other: &SymTensorField) -> SymTensorField {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &SymTensorField) -> SymTensorField {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn sup_distance(&self, other: &SymTensorField) -> f64 {
        self.xx
            .sup_distance(&other.xx)
            .max(self.xy.sup_distance(&other.xy))
            .max(self.yy.sup_distance(&other.yy))
    }

    /// Pointwise multiplication of all entries by a scalar weight field.
    pub fn pointwise_scaled(&self, w: &ScalarField) -> SymTensorField {
        SymTensorField {
            xx: self.xx.pointwise_mul(w),
            xy: self.xy.pointwise_mul(w),
            yy: self.yy.pointwise_mul(w),
        }
    }

    /// Pointwise application of the tensor to a vector: (T v)_i = T_ij v_j.
    pub fn apply(&self, v: &VectorField) -> VectorField {
        VectorField {
            x: self.xx.pointwise_mul(&v.x).add(&self.xy.pointwise_mul(&v.y)),
            y: self.xy.pointwise_mul(&v.x).add(&self.yy.pointwise_mul(&v.y)),
        }
    }

    /// Symmetric outer product u (x) v symmetrized: entries (u_i v_j + u_j v_i)/2.
    pub fn symmetric_outer(u: &VectorField, v: &VectorField) -> SymTensorField {
        let xx = u.x.pointwise_mul(&v.x);
        let yy = u.y.pointwise_mul(&v.y);
        let mut xy = u.x.pointwise_mul(&v.y);
        let yx = u.y.pointwise_mul(&v.x);
        for (a, b) in xy.values_mut().iter_mut().zip(yx.values()) {
            *a = 0.5 * (*a + b);
        }
        SymTensorField { xx, xy, yy }
    }
}
