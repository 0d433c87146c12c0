//! The linearized advection system driven by oscillatory forcing.
//!
//! Around a drift `v` and a scalar background `th`, with zero data at the
//! window start, the pair `(w, d)` solves
//!
//! ```text
//!   dw/dt + (v.grad) w + (w.grad) v + grad p = F_m,    div w = 0,
//!   dd/dt + (v.grad) d + (w.grad) th         = F_d,
//! ```
//!
//! with mean-free pressure.  Forcings with a bounded antiderivative (an
//! oscillation in time) produce solutions whose size scales with that
//! antiderivative, which is the property the calling iteration relies on.

use std::cell::RefCell;
use std::rc::Rc;

use spectral_core::fft::Spectrum;
use spectral_core::ops::{self, Axis};
use spectral_core::{Grid, ScalarField, VectorField};

use crate::config::TimeStepperConfig;
use crate::error::TransportError;
use crate::euler::{check_indices, validate_samples};
use crate::stepper::{
    axis_speed, deriv_spec, five_point_derivative, grad_phys, march, phys_of, spec_of, SpecVec,
    TimeMemo,
};

/// Fields the system is linearized around.
pub struct LinearizedBackground<'a> {
    /// Advecting drift `v`.
    pub drift: &'a dyn Fn(f64) -> VectorField,
    /// Scalar background whose gradient couples `w` into the `d` equation;
    /// omit to drop the coupling.
    pub tracer_background: Option<&'a dyn Fn(f64) -> ScalarField>,
}

/// Right-hand-side forcings; omitted parts are zero.
#[derive(Default)]
pub struct LinearizedForcing<'a> {
    pub momentum: Option<&'a dyn Fn(f64) -> VectorField>,
    pub tracer: Option<&'a dyn Fn(f64) -> ScalarField>,
}

/// One snapshot of the linearized solution.
#[derive(Debug, Clone)]
pub struct NewtonState {
    pub velocity: VectorField,
    pub tracer: ScalarField,
    pub pressure: ScalarField,
}

/// Linearized-system snapshots plus the self-check report.
#[derive(Debug, Clone)]
pub struct NewtonTrajectory {
    times: Vec<f64>,
    states: Vec<NewtonState>,
    max_residual: f64,
    max_divergence: f64,
    steps: usize,
}

impl NewtonTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, j: usize) -> &NewtonState {
        &self.states[j]
    }

    /// Worst relative residual of the two equations at the checked samples.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Worst divergence sup of the velocity over the samples.
    pub fn max_divergence(&self) -> f64 {
        self.max_divergence
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Largest velocity sup norm over the samples.
    pub fn velocity_sup(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.velocity.sup_norm())
            .fold(0.0, f64::max)
    }

    /// Largest tracer sup norm over the samples.
    pub fn tracer_sup(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.tracer.sup_norm())
            .fold(0.0, f64::max)
    }
}

/// Everything time-dependent the right-hand side needs at one stage time.
struct BackgroundSlice {
    ux: ScalarField,
    uy: ScalarField,
    // Gradient of the drift, row-major: (d1 ux, d2 ux, d1 uy, d2 uy).
    g11: ScalarField,
    g12: ScalarField,
    g21: ScalarField,
    g22: ScalarField,
    // Gradient of the scalar background, when present.
    thx: Option<ScalarField>,
    thy: Option<ScalarField>,
    // Truncated forcing spectra.
    fmx: Option<Spectrum>,
    fmy: Option<Spectrum>,
    fd: Option<Spectrum>,
    speed: f64,
}

fn background_slice(
    grid: Grid,
    t: f64,
    background: &LinearizedBackground,
    forcing: &LinearizedForcing,
) -> BackgroundSlice {
    let u = (background.drift)(t);
    debug_assert!(u.grid().same_as(&grid).is_ok());
    let sx = spec_of(&u.x);
    let sy = spec_of(&u.y);
    let ux = phys_of(&sx);
    let uy = phys_of(&sy);
    let (g11, g12) = grad_phys(&sx);
    let (g21, g22) = grad_phys(&sy);
    let (thx, thy) = match background.tracer_background {
        Some(th) => {
            let s = spec_of(&th(t));
            let (a, b) = grad_phys(&s);
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    let (fmx, fmy) = match forcing.momentum {
        Some(f) => {
            let v = f(t);
            (Some(spec_of(&v.x)), Some(spec_of(&v.y)))
        }
        None => (None, None),
    };
    let fd = forcing.tracer.map(|f| spec_of(&f(t)));
    let speed = axis_speed(&ux, &uy);
    BackgroundSlice {
        ux,
        uy,
        g11,
        g12,
        g21,
        g22,
        thx,
        thy,
        fmx,
        fmy,
        fd,
        speed,
    }
}

/// Unprojected momentum transport spectra and the tracer transport spectrum.
fn transport_terms(slice: &BackgroundSlice, y: &SpecVec) -> (Spectrum, Spectrum, Spectrum) {
    let grid = slice.ux.grid();
    let wx = phys_of(&y.0[0]);
    let wy = phys_of(&y.0[1]);
    let (wxx, wxy) = grad_phys(&y.0[0]);
    let (wyx, wyy) = grad_phys(&y.0[1]);
    let (dx, dy) = grad_phys(&y.0[2]);

    let mut ax = ScalarField::zeros(grid);
    let mut ay = ScalarField::zeros(grid);
    let mut ad = ScalarField::zeros(grid);
    {
        let (ux, uy) = (slice.ux.values(), slice.uy.values());
        let (wxv, wyv) = (wx.values(), wy.values());
        let (oax, oay, oad) = (ax.values_mut(), ay.values_mut(), ad.values_mut());
        let (g11, g12, g21, g22) = (
            slice.g11.values(),
            slice.g12.values(),
            slice.g21.values(),
            slice.g22.values(),
        );
        for i in 0..oax.len() {
            oax[i] = ux[i] * wxx.values()[i]
                + uy[i] * wxy.values()[i]
                + wxv[i] * g11[i]
                + wyv[i] * g12[i];
            oay[i] = ux[i] * wyx.values()[i]
                + uy[i] * wyy.values()[i]
                + wxv[i] * g21[i]
                + wyv[i] * g22[i];
            oad[i] = ux[i] * dx.values()[i] + uy[i] * dy.values()[i];
        }
        if let (Some(thx), Some(thy)) = (&slice.thx, &slice.thy) {
            for i in 0..oad.len() {
                oad[i] += wxv[i] * thx.values()[i] + wyv[i] * thy.values()[i];
            }
        }
    }
    (spec_of(&ax), spec_of(&ay), spec_of(&ad))
}

/// Signed combination `-transport + forcing` before any projection.
fn raw_rhs(slice: &BackgroundSlice, y: &SpecVec) -> (Spectrum, Spectrum, Spectrum) {
    let (mut ax, mut ay, mut ad) = transport_terms(slice, y);
    for c in ax.bins_mut() {
        *c = -*c;
    }
    for c in ay.bins_mut() {
        *c = -*c;
    }
    for c in ad.bins_mut() {
        *c = -*c;
    }
    if let (Some(fx), Some(fy)) = (&slice.fmx, &slice.fmy) {
        for (a, s) in ax.bins_mut().iter_mut().zip(fx.bins()) {
            *a += s;
        }
        for (a, s) in ay.bins_mut().iter_mut().zip(fy.bins()) {
            *a += s;
        }
    }
    if let Some(fd) = &slice.fd {
        for (a, s) in ad.bins_mut().iter_mut().zip(fd.bins()) {
            *a += s;
        }
    }
    (ax, ay, ad)
}

fn projected_rhs(slice: &BackgroundSlice, y: &SpecVec) -> SpecVec {
    let (mut ax, mut ay, ad) = raw_rhs(slice, y);
    ops::leray_project_spectrum(&mut ax, &mut ay);
    SpecVec(vec![ax, ay, ad])
}

/// Mean-free pressure spectrum recovered from the unprojected right side.
fn pressure_spec(slice: &BackgroundSlice, y: &SpecVec) -> Spectrum {
    let (ax, ay, _) = raw_rhs(slice, y);
    let mut div = deriv_spec(&ax, Axis::X1);
    let dyy = deriv_spec(&ay, Axis::X2);
    for (d, s) in div.bins_mut().iter_mut().zip(dyy.bins()) {
        *d += s;
    }
    ops::inv_laplacian_spectrum(&mut div);
    div
}

/// Integrates the linearized system from zero data at `start`, recording
/// snapshots at `samples`.
pub fn solve_newton_system(
    cfg: &TimeStepperConfig,
    grid: Grid,
    start: f64,
    samples: &[f64],
    background: &LinearizedBackground,
    forcing: &LinearizedForcing,
) -> Result<NewtonTrajectory, TransportError> {
    validate_samples(start, samples)?;

    let memo: RefCell<TimeMemo<BackgroundSlice>> = RefCell::new(TimeMemo::new(4));
    let fetch = |t: f64| -> Rc<BackgroundSlice> {
        memo.borrow_mut()
            .fetch(t, || background_slice(grid, t, background, forcing))
    };

    let mut state = SpecVec(vec![
        Spectrum::zeros(grid),
        Spectrum::zeros(grid),
        Spectrum::zeros(grid),
    ]);
    let mut steps = 0usize;
    let mut t_prev = start;
    let mut times = Vec::with_capacity(samples.len());
    let mut states = Vec::with_capacity(samples.len());
    let mut spec_states = Vec::with_capacity(samples.len());
    let mut max_divergence = 0.0f64;

    for &t_j in samples {
        {
            let mut rhs = |t: f64, y: &SpecVec| projected_rhs(&fetch(t), y);
            let mut speed = |t: f64, _y: &SpecVec| fetch(t).speed;
            let mut guard = |_t: f64, _y: &SpecVec| Ok(());
            march(
                cfg, grid, &mut state, t_prev, t_j, &mut steps, &mut speed, &mut rhs, &mut guard,
            )?;
        }
        t_prev = t_j;

        let velocity = VectorField::new(phys_of(&state.0[0]), phys_of(&state.0[1]))?;
        let tracer = phys_of(&state.0[2]);
        let p = pressure_spec(&fetch(t_j), &state);
        debug_assert_eq!(p.coeff(0, 0).norm(), 0.0);
        let pressure = phys_of(&p);
        max_divergence = max_divergence.max(ops::divergence(&velocity).sup_norm());

        times.push(t_j);
        spec_states.push(state.clone());
        states.push(NewtonState {
            velocity,
            tracer,
            pressure,
        });
    }

    let mut max_residual = 0.0f64;
    let min_gap = crate::stepper::min_record_gap(start, samples);
    for &j in &check_indices(times.len(), cfg.residual_checks) {
        let y = &spec_states[j];
        let t_j = times[j];
        let slice = fetch(t_j);
        let h = crate::stepper::FD_STENCIL_FACTOR
            * cfg.step_size(grid.spacing(), slice.speed).min(min_gap);
        let mut rhs = |t: f64, s: &SpecVec| projected_rhs(&fetch(t), s);
        let der = five_point_derivative(y, t_j, h, &mut rhs);

        // Residual in the printed form: d/dt + transport + grad p - forcing.
        let (tx, ty, td) = transport_terms(&slice, y);
        let p = pressure_spec(&slice, y);
        let (px, py) = grad_phys(&p);
        let der_x = phys_of(&der.0[0]);
        let der_y = phys_of(&der.0[1]);
        let der_d = phys_of(&der.0[2]);
        let tx_p = phys_of(&tx);
        let ty_p = phys_of(&ty);
        let td_p = phys_of(&td);
        let zero = ScalarField::zeros(grid);
        let fx_p = slice.fmx.as_ref().map(phys_of).unwrap_or_else(|| zero.clone());
        let fy_p = slice.fmy.as_ref().map(phys_of).unwrap_or_else(|| zero.clone());
        let fd_p = slice.fd.as_ref().map(phys_of).unwrap_or_else(|| zero.clone());

        let mut mom = 0.0f64;
        let mut mom_scale = cfg.residual_scale_floor;
        let mut tra = 0.0f64;
        let mut tra_scale = cfg.residual_scale_floor;
        for i in 0..grid.points() {
            let rx = der_x.values()[i] + tx_p.values()[i] + px.values()[i] - fx_p.values()[i];
            let ry = der_y.values()[i] + ty_p.values()[i] + py.values()[i] - fy_p.values()[i];
            let rd = der_d.values()[i] + td_p.values()[i] - fd_p.values()[i];
            mom = mom.max(rx.abs()).max(ry.abs());
            tra = tra.max(rd.abs());
            mom_scale = mom_scale
                .max(der_x.values()[i].abs())
                .max(der_y.values()[i].abs())
                .max(tx_p.values()[i].abs())
                .max(ty_p.values()[i].abs())
                .max(px.values()[i].abs())
                .max(py.values()[i].abs())
                .max(fx_p.values()[i].abs())
                .max(fy_p.values()[i].abs());
            tra_scale = tra_scale
                .max(der_d.values()[i].abs())
                .max(td_p.values()[i].abs())
                .max(fd_p.values()[i].abs());
        }
        let rel = (mom / mom_scale).max(tra / tra_scale);
        max_residual = max_residual.max(rel);
        if rel > cfg.residual_gate {
            return Err(TransportError::ResidualGate {
                equation: "linearized advection",
                relative: rel,
                gate: cfg.residual_gate,
            });
        }
    }

    Ok(NewtonTrajectory {
        times,
        states,
        max_residual,
        max_divergence,
        steps,
    })
}
