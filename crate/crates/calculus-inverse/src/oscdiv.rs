//! Stationary-phase inverse divergence.
//!
//! A forcing G(x) cos(2 pi lambda k . Phi(x)) is rewritten, level by level,
//! as div(stress) + grad(pressure) + remainder, each level carrying one more
//! factor of lambda^{-1}. Amplitudes stay real; every complex factor
//! (profile antiderivatives, mode derivatives, the per-level 1/lambda) lives
//! in a per-term carrier coefficient.

use num_complex::Complex64;

use spectral_core::ops;
use spectral_core::{ScalarField, SymTensorField, VectorField};

use crate::error::CalculusError;
use crate::phase::{MatrixField, PhaseMap};

pub const MAX_DEPTH: usize = 3;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct OscDecomposition {
    pub lambda: u32,
    pub wavevector: (i64, i64),
    /// Trace-free symmetric stress per level, level factors included.
    pub stress_terms: Vec<(usize, SymTensorField)>,
    /// Pressure (half-trace) per level.
    pub pressure_terms: Vec<(usize, ScalarField)>,
    pub remainder: VectorField,
}

impl OscDecomposition {
    /// div(stresses) + grad(pressures) + remainder; equals the input forcing
    /// up to grid resolution.
    pub fn reassemble(&self) -> VectorField {
        let mut out = self.remainder.clone();
        for (_, s) in &self.stress_terms {
            out.add_scaled(&ops::tensor_divergence(s), 1.0);
        }
        for (_, p) in &self.pressure_terms {
            out.add_scaled(&ops::gradient(p), 1.0);
        }
        out
    }

    pub fn stress_sup(&self, level: usize) -> f64 {
        self.stress_terms
            .iter()
            .find(|(m, _)| *m == level)
            .map(|(_, s)| s.sup_norm())
            .unwrap_or(0.0)
    }

    pub fn pressure_sup(&self, level: usize) -> f64 {
        self.pressure_terms
            .iter()
            .find(|(m, _)| *m == level)
            .map(|(_, p)| p.sup_norm())
            .unwrap_or(0.0)
    }
}

struct Term {
    amp: VectorField,
    coeff: Complex64,
}

fn validate(
    map: &PhaseMap,
    k: (i64, i64),
    lambda: u32,
    depth: usize,
) -> Result<(), CalculusError> {
    if k == (0, 0) {
        return Err(CalculusError::ZeroWavevector);
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(CalculusError::DepthRange {
            depth,
            max: MAX_DEPTH,
        });
    }
    let nyquist = map.grid().nyquist();
    let freq = (lambda as i64) * k.0.abs().max(k.1.abs());
    if freq >= nyquist {
        return Err(CalculusError::FrequencyOverflow { frequency: freq, nyquist });
    }
    let measured = map.distortion();
    if measured > 0.5 {
        return Err(CalculusError::PhaseMapDistortion {
            measured,
            limit: 0.5,
        });
    }
    Ok(())
}

/// Symmetric amplitude matrix of one integration-by-parts step:
/// M^{ij} = H^i A^j_l + H^j A^i_l - (A A^T)^{ij} (H . grad Phi^l).
fn amplitude_matrix(
    h: &VectorField,
    a: &MatrixField,
    jac: &MatrixField,
    gram: &SymTensorField,
    l: usize,
) -> SymTensorField {
    let grid = h.grid();
    let (a1l, a2l) = match l {
        0 => (a.m11.values(), a.m21.values()),
        _ => (a.m12.values(), a.m22.values()),
    };
    let (j_l1, j_l2) = match l {
        0 => (jac.m11.values(), jac.m12.values()),
        _ => (jac.m21.values(), jac.m22.values()),
    };
    let hx = h.x.values();
    let hy = h.y.values();
    let mut out = SymTensorField::zeros(grid);
    for i in 0..grid.points() {
        let hdot = hx[i] * j_l1[i] + hy[i] * j_l2[i];
        out.xx.values_mut()[i] = 2.0 * hx[i] * a1l[i] - gram.xx.values()[i] * hdot;
        out.xy.values_mut()[i] = hx[i] * a2l[i] + hy[i] * a1l[i] - gram.xy.values()[i] * hdot;
        out.yy.values_mut()[i] = 2.0 * hy[i] * a2l[i] - gram.yy.values()[i] * hdot;
    }
    out
}

fn gram_of(a: &MatrixField) -> SymTensorField {
    let grid = a.grid();
    let mut out = SymTensorField::zeros(grid);
    for i in 0..grid.points() {
        let (a11, a12, a21, a22) = (
            a.m11.values()[i],
            a.m12.values()[i],
            a.m21.values()[i],
            a.m22.values()[i],
        );
        out.xx.values_mut()[i] = a11 * a11 + a12 * a12;
        out.xy.values_mut()[i] = a11 * a21 + a12 * a22;
        out.yy.values_mut()[i] = a21 * a21 + a22 * a22;
    }
    out
}

/// cos/sin combination Re(coeff e^{i theta}) as a grid field.
fn carrier_combination(cos_f: &ScalarField, sin_f: &ScalarField, coeff: Complex64) -> ScalarField {
    let mut out = cos_f.scaled(coeff.re);
    out.add_scaled(sin_f, -coeff.im);
    out
}

fn core(
    initial: Vec<Term>,
    map: &PhaseMap,
    k: (i64, i64),
    lambda: u32,
    depth: usize,
) -> Result<OscDecomposition, CalculusError> {
    validate(map, k, lambda, depth)?;
    let grid = map.grid();
    for t in &initial {
        grid.same_as(&t.amp.grid())?;
    }

    let jac = map.gradient();
    let a = jac.inverse();
    let gram = gram_of(&a);
    let (cos_f, sin_f) = map.carrier(k, lambda);

    let ksq = (k.0 * k.0 + k.1 * k.1) as f64;
    let inv_lap = -1.0 / (TWO_PI * TWO_PI * ksq);
    let lam_inv = 1.0 / lambda as f64;

    let mut stress_terms = Vec::with_capacity(depth);
    let mut pressure_terms = Vec::with_capacity(depth);
    let mut terms = initial;

    for level in 1..=depth {
        let mut stress = SymTensorField::zeros(grid);
        let mut pressure = ScalarField::zeros(grid);
        let mut next = Vec::with_capacity(terms.len() * 2);
        for t in &terms {
            let c1 = t.coeff * inv_lap;
            for l in 0..2 {
                let kl = if l == 0 { k.0 } else { k.1 };
                if kl == 0 {
                    continue;
                }
                let dl = c1 * Complex64::new(0.0, TWO_PI * kl as f64);
                let m = amplitude_matrix(&t.amp, &a, &jac, &gram, l);
                let wave = carrier_combination(&cos_f, &sin_f, dl);
                stress.add_scaled(&m.trace_free_part().pointwise_scaled(&wave), lam_inv);
                pressure.add_scaled(&m.half_trace().pointwise_mul(&wave), lam_inv);
                next.push(Term {
                    amp: ops::tensor_divergence(&m).scaled(-1.0),
                    coeff: dl * lam_inv,
                });
            }
        }
        stress_terms.push((level, stress));
        pressure_terms.push((level, pressure));
        terms = next;
    }

    let mut remainder = VectorField::zeros(grid);
    for t in &terms {
        let wave = carrier_combination(&cos_f, &sin_f, t.coeff);
        remainder.add_scaled(&t.amp.pointwise_scaled(&wave), 1.0);
    }

    Ok(OscDecomposition {
        lambda,
        wavevector: k,
        stress_terms,
        pressure_terms,
        remainder,
    })
}

/// Decomposes G(x) cos(2 pi lambda k . Phi(x)).
pub fn osc_inverse_div(
    g: &VectorField,
    map: &PhaseMap,
    k: (i64, i64),
    lambda: u32,
    depth: usize,
) -> Result<OscDecomposition, CalculusError> {
    core(
        vec![Term {
            amp: g.clone(),
            coeff: Complex64::new(1.0, 0.0),
        }],
        map,
        k,
        lambda,
        depth,
    )
}

/// Decomposes Re((G_re + i G_im)(x) e^{2 pi i lambda k . Phi(x)}).
pub fn osc_inverse_div_complex(
    g_re: &VectorField,
    g_im: &VectorField,
    map: &PhaseMap,
    k: (i64, i64),
    lambda: u32,
    depth: usize,
) -> Result<OscDecomposition, CalculusError> {
    core(
        vec![
            Term {
                amp: g_re.clone(),
                coeff: Complex64::new(1.0, 0.0),
            },
            Term {
                amp: g_im.clone(),
                coeff: Complex64::new(0.0, 1.0),
            },
        ],
        map,
        k,
        lambda,
        depth,
    )
}

/// Gradient potential for a scalar oscillatory forcing b cos(2 pi lambda
/// k . Phi); returns the potential and the measured divergence residual.
pub fn osc_inverse_div_scalar(
    b: &ScalarField,
    map: &PhaseMap,
    k: (i64, i64),
    lambda: u32,
) -> Result<(VectorField, f64), CalculusError> {
    validate(map, k, lambda, 1)?;
    map.grid().same_as(&b.grid())?;
    let (cos_f, _) = map.carrier(k, lambda);
    let mut forcing = b.pointwise_mul(&cos_f);
    let mean = forcing.mean();
    for v in forcing.values_mut() {
        *v -= mean;
    }
    let potential = ops::gradient(&ops::inv_laplacian(&forcing));
    let residual = ops::divergence(&potential).sup_distance(&forcing);
    Ok((potential, residual))
}
