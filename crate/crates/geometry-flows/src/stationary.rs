//! Steady planar flows built from lattice waves on one integer circle.
//!
//! Superposing sinusoidal shears whose wave vectors all share the same
//! length gives a real, divergence-free stationary velocity field: every
//! summand is an eigenfunction of the Laplacian with the same eigenvalue,
//! so the nonlinear transport term is a perfect gradient.  The exact
//! pressure closing the momentum balance is
//! `p = (|W|^2 + 4 pi^2 nu^2 psi^2) / 2` with `psi` the stream function and
//! `nu^2` the shared squared radius.

use std::f64::consts::PI;

use spectral_core::ops;
use spectral_core::{Grid, ScalarField, SymTensorField, VectorField};

use crate::directions::{norm_sq, perp, DirectionSet, FamilyId};
use crate::error::GeometryError;

/// A stationary velocity field with its stream function and exact pressure.
#[derive(Debug, Clone)]
pub struct StationaryFlow {
    velocity: VectorField,
    stream: ScalarField,
    pressure: ScalarField,
    radius_sq: i64,
    pairs: Vec<((i64, i64), f64)>,
}

/// Build a stationary flow from even coefficients on one family circle.
///
/// `coeffs` assigns a real coefficient to signed directions of `family`;
/// the assignment must be even under `k -> -k` (both signs present with
/// equal values) and all active directions must lie on a single lattice
/// circle.  An empty or all-zero assignment yields the zero flow.
pub fn stationary_flow(
    grid: Grid,
    dirs: &DirectionSet,
    family: FamilyId,
    coeffs: &[((i64, i64), f64)],
) -> Result<StationaryFlow, GeometryError> {
    for &(k, _) in coeffs {
        if !dirs.contains(family, k) {
            return Err(GeometryError::UnknownDirection { k });
        }
    }
    // Even symmetry: every active direction needs its opposite at the same value.
    let lookup = |k: (i64, i64)| -> Option<f64> {
        coeffs.iter().find(|&&(kk, _)| kk == k).map(|&(_, b)| b)
    };
    for &(k, b) in coeffs {
        match lookup((-k.0, -k.1)) {
            Some(b_opp) if b_opp == b => {}
            _ => return Err(GeometryError::AsymmetricCoefficients { k }),
        }
    }
    // Single circle: collect active (nonzero) radii.
    let mut radius_sq: Option<i64> = None;
    for &(k, b) in coeffs {
        if b == 0.0 {
            continue;
        }
        let r = norm_sq(k);
        match radius_sq {
            None => radius_sq = Some(r),
            Some(prev) if prev != r => {
                return Err(GeometryError::MixedRadii { a: prev, b: r })
            }
            _ => {}
        }
    }
    let radius_sq = radius_sq.unwrap_or(1);

    // One contribution per +/- pair, carrying the shared coefficient.
    let mut pairs: Vec<((i64, i64), f64)> = Vec::new();
    for &rep in dirs.pair_representatives(family) {
        if let Some(b) = lookup(rep) {
            if b != 0.0 {
                pairs.push((rep, b));
            }
        }
    }

    let nu = (radius_sq as f64).sqrt();
    let wave = |x1: f64, x2: f64, k: (i64, i64)| 2.0 * PI * (k.0 as f64 * x1 + k.1 as f64 * x2);
    let velocity = VectorField::from_fn(grid, |x1, x2| {
        let mut vx = 0.0;
        let mut vy = 0.0;
        for &(k, b) in &pairs {
            let s = 2.0 * b * wave(x1, x2, k).sin() / nu;
            let kp = perp(k);
            vx += s * kp.0 as f64;
            vy += s * kp.1 as f64;
        }
        (vx, vy)
    });
    let stream = ScalarField::from_fn(grid, |x1, x2| {
        let mut acc = 0.0;
        for &(k, b) in &pairs {
            acc += b / (PI * nu) * wave(x1, x2, k).cos();
        }
        acc
    });
    let pressure = ScalarField::from_fn(grid, |x1, x2| {
        let mut vx = 0.0;
        let mut vy = 0.0;
        let mut psi = 0.0;
        for &(k, b) in &pairs {
            let theta = wave(x1, x2, k);
            let s = 2.0 * b * theta.sin() / nu;
            let kp = perp(k);
            vx += s * kp.0 as f64;
            vy += s * kp.1 as f64;
            psi += b / (PI * nu) * theta.cos();
        }
        0.5 * (vx * vx + vy * vy + 4.0 * PI * PI * radius_sq as f64 * psi * psi)
    });

    Ok(StationaryFlow { velocity, stream, pressure, radius_sq, pairs })
}

impl StationaryFlow {
    pub fn velocity(&self) -> &VectorField {
        &self.velocity
    }

    /// Stream function: the velocity is its perpendicular gradient.
    pub fn stream(&self) -> &ScalarField {
        &self.stream
    }

    /// Exact pressure closing the stationary momentum balance.
    pub fn pressure(&self) -> &ScalarField {
        &self.pressure
    }

    /// Shared squared radius of the active wave vectors.
    pub fn radius_sq(&self) -> i64 {
        self.radius_sq
    }

    /// Active pair representatives with their coefficients.
    pub fn pairs(&self) -> &[((i64, i64), f64)] {
        &self.pairs
    }

    /// Sup of the spectral divergence (zero up to roundoff by construction).
    pub fn divergence_sup(&self) -> f64 {
        ops::divergence(&self.velocity).sup_norm()
    }

    /// Sup residual of div(W (x) W) = grad p, evaluated spectrally.
    pub fn momentum_residual_sup(&self) -> f64 {
        let quad = SymTensorField::symmetric_outer(&self.velocity, &self.velocity);
        let transport = ops::tensor_divergence(&quad);
        let forcing = ops::gradient(&self.pressure);
        transport.sup_distance(&forcing)
    }

    /// Sup residual of W = perp-gradient of the stream function.
    pub fn stream_residual_sup(&self) -> f64 {
        let lifted = ops::perp_gradient(&self.stream);
        lifted.sup_distance(&self.velocity)
    }
}
