//! Uniformly sampled time series of fields with cubic interpolation.
//!
//! Solvers exchange time-dependent data through closures `t -> field`; this
//! module supplies the standard way to build such closures from discrete
//! snapshots.  Interpolation is four-point Lagrange (locally cubic), which
//! matches the fourth-order accuracy of the steppers, and is exact at the
//! sample times themselves: a query that lands on a node returns a bitwise
//! clone of the stored snapshot.

use spectral_core::{ScalarField, SymTensorField, VectorField};

use crate::error::TransportError;

/// Values that can be linearly combined, as interpolation requires.
pub trait LinearField: Clone {
    /// `self += c * other`.
    fn lin_add_scaled(&mut self, other: &Self, c: f64);
    /// `self *= c`.
    fn lin_scale(&mut self, c: f64);
}

impl LinearField for ScalarField {
    fn lin_add_scaled(&mut self, other: &Self, c: f64) {
        self.add_scaled(other, c);
    }
    fn lin_scale(&mut self, c: f64) {
        self.scale(c);
    }
}

impl LinearField for VectorField {
    fn lin_add_scaled(&mut self, other: &Self, c: f64) {
        self.add_scaled(other, c);
    }
    fn lin_scale(&mut self, c: f64) {
        self.scale(c);
    }
}

impl LinearField for SymTensorField {
    fn lin_add_scaled(&mut self, other: &Self, c: f64) {
        self.add_scaled(other, c);
    }
    fn lin_scale(&mut self, c: f64) {
        self.scale(c);
    }
}

impl LinearField for f64 {
    fn lin_add_scaled(&mut self, other: &Self, c: f64) {
        *self += c * other;
    }
    fn lin_scale(&mut self, c: f64) {
        *self *= c;
    }
}

/// Snapshots on a uniform time lattice.
#[derive(Debug, Clone)]
pub struct TimeSeries<T> {
    start: f64,
    step: f64,
    values: Vec<T>,
}

/// Relative slack when deciding whether a query time sits on a lattice node.
const NODE_SNAP: f64 = 1e-9;

impl<T: LinearField> TimeSeries<T> {
    /// Builds a series from explicit times, which must be uniformly spaced.
    pub fn new(times: &[f64], values: Vec<T>) -> Result<Self, TransportError> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(TransportError::SeriesTooShort {
                got: times.len().min(values.len()),
                min: 2,
            });
        }
        let step = times[1] - times[0];
        if !(step > 0.0) {
            return Err(TransportError::NonUniformSeries { index: 1 });
        }
        for j in 1..times.len() {
            let expected = times[0] + step * j as f64;
            if (times[j] - expected).abs() > NODE_SNAP * step {
                return Err(TransportError::NonUniformSeries { index: j });
            }
        }
        Ok(TimeSeries {
            start: times[0],
            step,
            values,
        })
    }

    /// Builds a series directly from a start time and positive step.
    pub fn from_uniform(start: f64, step: f64, values: Vec<T>) -> Result<Self, TransportError> {
        if values.len() < 2 {
            return Err(TransportError::SeriesTooShort {
                got: values.len(),
                min: 2,
            });
        }
        if !(step > 0.0) {
            return Err(TransportError::NonUniformSeries { index: 1 });
        }
        Ok(TimeSeries {
            start,
            step,
            values,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    pub fn value(&self, j: usize) -> &T {
        &self.values[j]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Interpolated value at `t`.  Exact (a bitwise clone) on lattice nodes;
    /// queries outside the covered span use the boundary stencil, so mild
    /// extrapolation stays cubic.
    pub fn eval(&self, t: f64) -> T {
        let u = (t - self.start) / self.step;
        let nearest = u.round();
        if (u - nearest).abs() <= NODE_SNAP && nearest >= 0.0 && (nearest as usize) < self.values.len()
        {
            return self.values[nearest as usize].clone();
        }
        if self.values.len() < 4 {
            // Linear fallback for very short series.
            let j = (u.floor() as isize).clamp(0, self.values.len() as isize - 2) as usize;
            let xi = u - j as f64;
            let mut out = self.values[j].clone();
            out.lin_scale(1.0 - xi);
            out.lin_add_scaled(&self.values[j + 1], xi);
            return out;
        }
        let base = (u.floor() as isize - 1).clamp(0, self.values.len() as isize - 4) as usize;
        let xi = u - base as f64;
        let w0 = -(xi - 1.0) * (xi - 2.0) * (xi - 3.0) / 6.0;
        let w1 = xi * (xi - 2.0) * (xi - 3.0) / 2.0;
        let w2 = -xi * (xi - 1.0) * (xi - 3.0) / 2.0;
        let w3 = xi * (xi - 1.0) * (xi - 2.0) / 6.0;
        let mut out = self.values[base].clone();
        out.lin_scale(w0);
        out.lin_add_scaled(&self.values[base + 1], w1);
        out.lin_add_scaled(&self.values[base + 2], w2);
        out.lin_add_scaled(&self.values[base + 3], w3);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_series(f: impl Fn(f64) -> f64, start: f64, step: f64, count: usize) -> TimeSeries<f64> {
        let values: Vec<f64> = (0..count).map(|j| f(start + step * j as f64)).collect();
        TimeSeries::from_uniform(start, step, values).unwrap()
    }

    #[test]
    fn nodes_are_reproduced_bitwise() {
        let s = scalar_series(|t| (1.3 * t).sin(), 0.25, 0.1, 9);
        for j in 0..9 {
            let t = s.time(j);
            assert_eq!(s.eval(t), *s.value(j));
        }
    }

    #[test]
    fn cubics_are_interpolated_exactly() {
        let p = |t: f64| 2.0 - t + 3.0 * t * t - 0.5 * t * t * t;
        let s = scalar_series(p, -1.0, 0.25, 12);
        for m in 0..50 {
            let t = -1.0 + 2.75 * m as f64 / 49.0;
            assert!((s.eval(t) - p(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn smooth_functions_interpolate_at_fourth_order() {
        let f = |t: f64| (2.0 * t).sin();
        let coarse = scalar_series(f, 0.0, 0.1, 11);
        let fine = scalar_series(f, 0.0, 0.05, 21);
        let worst = |s: &TimeSeries<f64>| {
            (0..100)
                .map(|m| {
                    let t = 0.1 + 0.8 * m as f64 / 99.0;
                    (s.eval(t) - f(t)).abs()
                })
                .fold(0.0, f64::max)
        };
        let e_coarse = worst(&coarse);
        let e_fine = worst(&fine);
        assert!(e_coarse < 2e-4, "coarse error {e_coarse}");
        // Fourth order: halving the step shrinks the error about 16x.
        assert!(
            e_fine < e_coarse / 10.0,
            "errors {e_coarse} vs {e_fine} decay too slowly"
        );
    }

    #[test]
    fn non_uniform_times_are_rejected() {
        let err = TimeSeries::new(&[0.0, 0.1, 0.3], vec![1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, TransportError::NonUniformSeries { index: 2 }));
    }
}
