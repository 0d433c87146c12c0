//! Right inverses of the divergence operator on mean-free data.

use spectral_core::ops;
use spectral_core::{Axis, ScalarField, SymTensorField, VectorField};

use crate::error::CalculusError;

const MEAN_FREE_TOL: f64 = 1e-12;

fn require_mean_free(mean: f64, scale: f64) -> Result<(), CalculusError> {
    let tol = MEAN_FREE_TOL * scale.max(1.0);
    if mean.abs() > tol {
        return Err(CalculusError::NotMeanFree {
            mean: mean.abs(),
            tol,
        });
    }
    Ok(())
}

/// Symmetric trace-free tensor R with div R = u, for mean-free u.
///
/// Built from the component potentials w = inv_laplacian(u) as
/// grad w + (grad w)^T - (div w) Id.
pub fn inv_div_tensor(u: &VectorField) -> Result<SymTensorField, CalculusError> {
    let scale = u.sup_norm();
    let (mx, my) = u.mean();
    require_mean_free(mx, scale)?;
    require_mean_free(my, scale)?;

    let wx = ops::inv_laplacian(&u.x);
    let wy = ops::inv_laplacian(&u.y);
    let d1wx = ops::derivative(&wx, Axis::X1, 1).expect("order 1");
    let d2wx = ops::derivative(&wx, Axis::X2, 1).expect("order 1");
    let d1wy = ops::derivative(&wy, Axis::X1, 1).expect("order 1");
    let d2wy = ops::derivative(&wy, Axis::X2, 1).expect("order 1");

    // xx = d1 wx - d2 wy, yy = -xx, xy = d2 wx + d1 wy.
    let xx = d1wx.sub(&d2wy);
    let yy = xx.scaled(-1.0);
    let xy = d2wx.add(&d1wy);
    Ok(SymTensorField { xx, xy, yy })
}

/// Gradient field v with div v = f, for mean-free f.
pub fn inv_div_vector(f: &ScalarField) -> Result<VectorField, CalculusError> {
    require_mean_free(f.mean(), f.sup_norm())?;
    Ok(ops::gradient(&ops::inv_laplacian(f)))
}
