//! Spectral operators: derivatives, projections, dealiased products, norms.

use num_complex::Complex64;

use crate::error::SpectralError;
use crate::fft::{self, Spectrum};
use crate::field::{ScalarField, SymTensorField, VectorField};

pub const MAX_DERIVATIVE_ORDER: u32 = 8;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// In-place spectral derivative of the given order along one axis.
///
/// Odd orders zero the Nyquist line (it carries no usable sign information);
/// dealiased fields never populate it in the first place.
pub fn derivative_spectrum(s: &mut Spectrum, axis: Axis, order: u32) {
    if order == 0 {
        return;
    }
    let nyq = s.grid().nyquist();
    let odd = order % 2 == 1;
    s.map_modes(|k1, k2, c| {
        let k = match axis {
            Axis::X1 => k1,
            Axis::X2 => k2,
        };
        if odd && k.abs() == nyq {
            return Complex64::new(0.0, 0.0);
        }
        let factor = Complex64::new(0.0, TWO_PI * k as f64).powu(order);
        c * factor
    });
}

/// Spectral derivative; exact on band-limited data. Order capped at 8.
pub fn derivative(f: &ScalarField, axis: Axis, order: u32) -> Result<ScalarField, SpectralError> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(SpectralError::DerivativeOrder {
            order,
            max: MAX_DERIVATIVE_ORDER,
        });
    }
    if order == 0 {
        return Ok(f.clone());
    }
    let mut s = fft::forward(f);
    derivative_spectrum(&mut s, axis, order);
    Ok(fft::inverse(&s))
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField {
        x: derivative(f, Axis::X1, 1).expect("order 1"),
        y: derivative(f, Axis::X2, 1).expect("order 1"),
    }
}

/// Rotated gradient (-d/dx2, d/dx1); exactly divergence-free analytically.
pub fn perp_gradient(psi: &ScalarField) -> VectorField {
    VectorField {
        x: derivative(psi, Axis::X2, 1).expect("order 1").scaled(-1.0),
        y: derivative(psi, Axis::X1, 1).expect("order 1"),
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let dx = derivative(&u.x, Axis::X1, 1).expect("order 1");
    let dy = derivative(&u.y, Axis::X2, 1).expect("order 1");
    dx.add(&dy)
}

/// Scalar curl d1 u_y - d2 u_x.
pub fn curl(u: &VectorField) -> ScalarField {
    let a = derivative(&u.y, Axis::X1, 1).expect("order 1");
    let b = derivative(&u.x, Axis::X2, 1).expect("order 1");
    a.sub(&b)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let mut s = fft::forward(f);
    s.map_modes(|k1, k2, c| {
        let k2sum = (k1 * k1 + k2 * k2) as f64;
        c * (-TWO_PI * TWO_PI * k2sum)
    });
    fft::inverse(&s)
}

/// Zero-mean solution of Laplace's equation: mode k -> c_k / (-4 pi^2 |k|^2),
/// zero mode dropped.
pub fn inv_laplacian(f: &ScalarField) -> ScalarField {
    let mut s = fft::forward(f);
    inv_laplacian_spectrum(&mut s);
    fft::inverse(&s)
}

pub fn inv_laplacian_spectrum(s: &mut Spectrum) {
    s.map_modes(|k1, k2, c| {
        let k2sum = (k1 * k1 + k2 * k2) as f64;
        if k2sum == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c / (-TWO_PI * TWO_PI * k2sum)
        }
    });
}

/// Removes the gradient part mode by mode, keeping the mean. The returned
/// field is divergence-free and differs from the input by a gradient.
pub fn leray_project(u: &VectorField) -> VectorField {
    let mut sx = fft::forward(&u.x);
    let mut sy = fft::forward(&u.y);
    leray_project_spectrum(&mut sx, &mut sy);
    VectorField {
        x: fft::inverse(&sx),
        y: fft::inverse(&sy),
    }
}

pub fn leray_project_spectrum(sx: &mut Spectrum, sy: &mut Spectrum) {
    let grid = sx.grid();
    let n = grid.n();
    for i2 in 0..n {
        let k2 = grid.freq(i2);
        for i1 in 0..n {
            let k1 = grid.freq(i1);
            let ksq = (k1 * k1 + k2 * k2) as f64;
            if ksq == 0.0 {
                continue;
            }
            let idx = i2 * n + i1;
            let cx = sx.bins()[idx];
            let cy = sy.bins()[idx];
            let kdot = (k1 as f64 * cx + k2 as f64 * cy) / ksq;
            sx.bins_mut()[idx] = cx - kdot * k1 as f64;
            sy.bins_mut()[idx] = cy - kdot * k2 as f64;
        }
    }
}

/// Truncates to the dealias band.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let mut s = fft::forward(f);
    s.truncate();
    fft::inverse(&s)
}

/// Dealiased pointwise product: the band-limited invariant preserving product.
pub fn product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    dealias(&f.pointwise_mul(g))
}

/// Max spectral magnitude beyond the dealias band (band-limit defect).
pub fn band_defect(f: &ScalarField) -> f64 {
    fft::forward(f).tail_max()
}

/// Divergence sup-norm together with the gradient sup-norm used to scale the
/// solenoidal gate.
pub fn solenoidal_defect(u: &VectorField) -> (f64, f64) {
    let div = divergence(u).sup_norm();
    let grad = norm_c_vector(u, 1).expect("order 1");
    (div, grad)
}

fn norm_c_scalar_inner(f: &ScalarField, order: u32) -> f64 {
    let base = fft::forward(f);
    let mut worst = 0.0f64;
    for g1 in 0..=order {
        for g2 in 0..=(order - g1) {
            let mut s = base.clone();
            derivative_spectrum(&mut s, Axis::X1, g1);
            derivative_spectrum(&mut s, Axis::X2, g2);
            worst = worst.max(fft::inverse(&s).sup_norm());
        }
    }
    worst
}

/// Sup norm over all spectral derivatives of total order <= `order`.
pub fn norm_c(f: &ScalarField, order: u32) -> Result<f64, SpectralError> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(SpectralError::DerivativeOrder {
            order,
            max: MAX_DERIVATIVE_ORDER,
        });
    }
    Ok(norm_c_scalar_inner(f, order))
}

pub fn norm_c_vector(u: &VectorField, order: u32) -> Result<f64, SpectralError> {
    Ok(norm_c(&u.x, order)?.max(norm_c(&u.y, order)?))
}

pub fn norm_c_tensor(t: &SymTensorField, order: u32) -> Result<f64, SpectralError> {
    Ok(norm_c(&t.xx, order)?
        .max(norm_c(&t.xy, order)?)
        .max(norm_c(&t.yy, order)?))
}

/// Divergence of a symmetric tensor: (d1 xx + d2 xy, d1 xy + d2 yy).
pub fn tensor_divergence(t: &SymTensorField) -> VectorField {
    let a = derivative(&t.xx, Axis::X1, 1).expect("order 1");
    let b = derivative(&t.xy, Axis::X2, 1).expect("order 1");
    let c = derivative(&t.xy, Axis::X1, 1).expect("order 1");
    let d = derivative(&t.yy, Axis::X2, 1).expect("order 1");
    VectorField {
        x: a.add(&b),
        y: c.add(&d),
    }
}

/// Advection term (u . grad) f with a dealiased product.
pub fn advect_scalar(u: &VectorField, f: &ScalarField) -> ScalarField {
    let fx = derivative(f, Axis::X1, 1).expect("order 1");
    let fy = derivative(f, Axis::X2, 1).expect("order 1");
    dealias(&u.x.pointwise_mul(&fx).add(&u.y.pointwise_mul(&fy)))
}

pub fn advect_vector(u: &VectorField, w: &VectorField) -> VectorField {
    VectorField {
        x: advect_scalar(u, &w.x),
        y: advect_scalar(u, &w.y),
    }
}
