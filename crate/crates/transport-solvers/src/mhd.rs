//! The planar magnetohydrodynamic perturbation system.
//!
//! Around a velocity background `U` and a magnetic background `B`, the
//! divergence-free pair `(v, b)` solves
//!
//! ```text
//!   dv/dt + (v.grad)v + (v.grad)U + (U.grad)v + grad p
//!       = (b.grad)b + (B.grad)b + (b.grad)B + div S_v + F,
//!   db/dt + (v.grad)b + (U.grad)b + (v.grad)B
//!       = (b.grad)v + (B.grad)v + (b.grad)U - perp_grad(c),
//! ```
//!
//! where `S_v` is a symmetric stress, the scalar `c` encodes an
//! antisymmetric stress (its divergence is minus the perpendicular
//! gradient), and `F` is an extra body force.  With both backgrounds and
//! all forcings absent this is the ideal planar system, which conserves
//! the combined energy of `v` and `b`; the solver measures that drift and
//! gates it in the unforced case.

use std::cell::RefCell;
use std::rc::Rc;

use spectral_core::fft::Spectrum;
use spectral_core::ops::{self, Axis};
use spectral_core::{Grid, ScalarField, SymTensorField, VectorField};

use crate::config::TimeStepperConfig;
use crate::error::TransportError;
use crate::euler::{check_indices, solenoidal_gate, validate_samples};
use crate::stepper::{
    axis_speed, deriv_spec, five_point_derivative, grad_phys, march, phys_of, spec_of, SpecVec,
    TimeMemo,
};

/// Background fields the perturbation rides on; omitted parts are zero.
#[derive(Default)]
pub struct MhdBackground<'a> {
    pub velocity: Option<&'a dyn Fn(f64) -> VectorField>,
    pub magnetic: Option<&'a dyn Fn(f64) -> VectorField>,
}

impl MhdBackground<'_> {
    fn is_empty(&self) -> bool {
        self.velocity.is_none() && self.magnetic.is_none()
    }
}

/// Forcings; omitted parts are zero.
///
/// `stress_magnetic` is the single scalar `c` of a planar antisymmetric
/// tensor with entries `(0, c; -c, 0)`; its divergence enters the magnetic
/// equation as `(d2 c, -d1 c)`.
#[derive(Default)]
pub struct MhdForcing<'a> {
    pub stress_velocity: Option<&'a dyn Fn(f64) -> SymTensorField>,
    pub stress_magnetic: Option<&'a dyn Fn(f64) -> ScalarField>,
    pub force: Option<&'a dyn Fn(f64) -> VectorField>,
}

impl MhdForcing<'_> {
    fn is_empty(&self) -> bool {
        self.stress_velocity.is_none() && self.stress_magnetic.is_none() && self.force.is_none()
    }
}

/// One snapshot of the perturbation.
#[derive(Debug, Clone)]
pub struct MhdState {
    pub velocity: VectorField,
    pub magnetic: VectorField,
    pub pressure: ScalarField,
}

/// Perturbation snapshots plus the self-check report.
#[derive(Debug, Clone)]
pub struct MhdPerturbationTrajectory {
    times: Vec<f64>,
    states: Vec<MhdState>,
    max_residual: f64,
    max_divergence: f64,
    energy_drift: f64,
    steps: usize,
}

impl MhdPerturbationTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, j: usize) -> &MhdState {
        &self.states[j]
    }

    /// Worst relative residual over the checked samples.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Worst divergence sup over both fields and all samples.
    pub fn max_divergence(&self) -> f64 {
        self.max_divergence
    }

    /// Relative change of the combined squared size of both fields, over
    /// the samples, against its initial value.
    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Combined squared size at sample `j`.
    pub fn energy(&self, j: usize) -> f64 {
        let s = &self.states[j];
        s.velocity.l2_norm().powi(2) + s.magnetic.l2_norm().powi(2)
    }

    /// Largest velocity sup norm over the samples.
    pub fn velocity_sup(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.velocity.sup_norm())
            .fold(0.0, f64::max)
    }

    /// Largest magnetic sup norm over the samples.
    pub fn magnetic_sup(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.magnetic.sup_norm())
            .fold(0.0, f64::max)
    }
}

/// A vector field with its physical values and gradient slices.
struct FieldSlice {
    x: ScalarField,
    y: ScalarField,
    g11: ScalarField,
    g12: ScalarField,
    g21: ScalarField,
    g22: ScalarField,
}

fn field_slice(sx: &Spectrum, sy: &Spectrum) -> FieldSlice {
    let (g11, g12) = grad_phys(sx);
    let (g21, g22) = grad_phys(sy);
    FieldSlice {
        x: phys_of(sx),
        y: phys_of(sy),
        g11,
        g12,
        g21,
        g22,
    }
}

fn field_slice_of(v: &VectorField) -> FieldSlice {
    field_slice(&spec_of(&v.x), &spec_of(&v.y))
}

/// Time-dependent data cached per stage time.
struct DrivingSlice {
    u: Option<FieldSlice>,
    b: Option<FieldSlice>,
    // Truncated spectra of the total momentum forcing (stress divergence
    // plus body force) and of the magnetic stress divergence.
    fvx: Option<Spectrum>,
    fvy: Option<Spectrum>,
    fbx: Option<Spectrum>,
    fby: Option<Spectrum>,
    speed: f64,
}

fn driving_slice(
    grid: Grid,
    t: f64,
    background: &MhdBackground,
    forcing: &MhdForcing,
) -> DrivingSlice {
    let u = background.velocity.map(|f| field_slice_of(&f(t)));
    let b = background.magnetic.map(|f| field_slice_of(&f(t)));

    let mut fvx: Option<Spectrum> = None;
    let mut fvy: Option<Spectrum> = None;
    if let Some(stress) = forcing.stress_velocity {
        let d = ops::tensor_divergence(&stress(t));
        fvx = Some(spec_of(&d.x));
        fvy = Some(spec_of(&d.y));
    }
    if let Some(extra) = forcing.force {
        let v = extra(t);
        let ax = spec_of(&v.x);
        let ay = spec_of(&v.y);
        match (&mut fvx, &mut fvy) {
            (Some(px), Some(py)) => {
                for (a, s) in px.bins_mut().iter_mut().zip(ax.bins()) {
                    *a += s;
                }
                for (a, s) in py.bins_mut().iter_mut().zip(ay.bins()) {
                    *a += s;
                }
            }
            _ => {
                fvx = Some(ax);
                fvy = Some(ay);
            }
        }
    }

    let (fbx, fby) = match forcing.stress_magnetic {
        Some(c) => {
            // div (0, c; -c, 0) = (d2 c, -d1 c).
            let s = spec_of(&c(t));
            let d2 = deriv_spec(&s, Axis::X2);
            let mut d1 = deriv_spec(&s, Axis::X1);
            for v in d1.bins_mut() {
                *v = -*v;
            }
            (Some(d2), Some(d1))
        }
        None => (None, None),
    };

    let mut speed = 0.0f64;
    if let Some(f) = &u {
        speed = speed.max(axis_speed(&f.x, &f.y));
    }
    if let Some(f) = &b {
        speed = speed.max(axis_speed(&f.x, &f.y));
    }
    let _ = grid;
    DrivingSlice {
        u,
        b,
        fvx,
        fvy,
        fbx,
        fby,
        speed,
    }
}

/// Momentum and magnetic transport sums, physical space, before negation:
/// `mom = (v.grad)v + (v.grad)U + (U.grad)v - (b.grad)b - (B.grad)b - (b.grad)B`
/// and
/// `mag = (v.grad)b + (U.grad)b + (v.grad)B - (b.grad)v - (B.grad)v - (b.grad)U`.
struct TransportSums {
    mom_x: ScalarField,
    mom_y: ScalarField,
    mag_x: ScalarField,
    mag_y: ScalarField,
}

fn transport_sums(grid: Grid, slice: &DrivingSlice, y: &SpecVec) -> TransportSums {
    let v = field_slice(&y.0[0], &y.0[1]);
    let bb = field_slice(&y.0[2], &y.0[3]);

    let mut mom_x = ScalarField::zeros(grid);
    let mut mom_y = ScalarField::zeros(grid);
    let mut mag_x = ScalarField::zeros(grid);
    let mut mag_y = ScalarField::zeros(grid);

    // (a.grad)f evaluated pointwise from physical slices.
    let adv = |a: &FieldSlice, f: &FieldSlice, i: usize, comp: usize| -> f64 {
        match comp {
            0 => a.x.values()[i] * f.g11.values()[i] + a.y.values()[i] * f.g12.values()[i],
            _ => a.x.values()[i] * f.g21.values()[i] + a.y.values()[i] * f.g22.values()[i],
        }
    };

    for i in 0..grid.points() {
        let mut mx = adv(&v, &v, i, 0) - adv(&bb, &bb, i, 0);
        let mut my = adv(&v, &v, i, 1) - adv(&bb, &bb, i, 1);
        let mut gx = adv(&v, &bb, i, 0) - adv(&bb, &v, i, 0);
        let mut gy = adv(&v, &bb, i, 1) - adv(&bb, &v, i, 1);
        if let Some(u) = &slice.u {
            mx += adv(&v, u, i, 0) + adv(u, &v, i, 0);
            my += adv(&v, u, i, 1) + adv(u, &v, i, 1);
            gx += adv(u, &bb, i, 0) - adv(&bb, u, i, 0);
            gy += adv(u, &bb, i, 1) - adv(&bb, u, i, 1);
        }
        if let Some(bg) = &slice.b {
            mx += -adv(bg, &bb, i, 0) - adv(&bb, bg, i, 0);
            my += -adv(bg, &bb, i, 1) - adv(&bb, bg, i, 1);
            gx += adv(&v, bg, i, 0) - adv(bg, &v, i, 0);
            gy += adv(&v, bg, i, 1) - adv(bg, &v, i, 1);
        }
        mom_x.values_mut()[i] = mx;
        mom_y.values_mut()[i] = my;
        mag_x.values_mut()[i] = gx;
        mag_y.values_mut()[i] = gy;
    }

    TransportSums {
        mom_x,
        mom_y,
        mag_x,
        mag_y,
    }
}

/// Unprojected momentum right side `-mom + forcing` in spectral form.
fn raw_momentum_rhs(slice: &DrivingSlice, sums: &TransportSums) -> (Spectrum, Spectrum) {
    let mut ax = spec_of(&sums.mom_x);
    let mut ay = spec_of(&sums.mom_y);
    for c in ax.bins_mut() {
        *c = -*c;
    }
    for c in ay.bins_mut() {
        *c = -*c;
    }
    if let (Some(fx), Some(fy)) = (&slice.fvx, &slice.fvy) {
        for (a, s) in ax.bins_mut().iter_mut().zip(fx.bins()) {
            *a += s;
        }
        for (a, s) in ay.bins_mut().iter_mut().zip(fy.bins()) {
            *a += s;
        }
    }
    (ax, ay)
}

fn raw_magnetic_rhs(slice: &DrivingSlice, sums: &TransportSums) -> (Spectrum, Spectrum) {
    let mut ax = spec_of(&sums.mag_x);
    let mut ay = spec_of(&sums.mag_y);
    for c in ax.bins_mut() {
        *c = -*c;
    }
    for c in ay.bins_mut() {
        *c = -*c;
    }
    if let (Some(fx), Some(fy)) = (&slice.fbx, &slice.fby) {
        for (a, s) in ax.bins_mut().iter_mut().zip(fx.bins()) {
            *a += s;
        }
        for (a, s) in ay.bins_mut().iter_mut().zip(fy.bins()) {
            *a += s;
        }
    }
    (ax, ay)
}

fn projected_rhs(grid: Grid, slice: &DrivingSlice, y: &SpecVec) -> SpecVec {
    let sums = transport_sums(grid, slice, y);
    let (mut vx, mut vy) = raw_momentum_rhs(slice, &sums);
    ops::leray_project_spectrum(&mut vx, &mut vy);
    let (mut bx, mut by) = raw_magnetic_rhs(slice, &sums);
    ops::leray_project_spectrum(&mut bx, &mut by);
    SpecVec(vec![vx, vy, bx, by])
}

fn pressure_spec(grid: Grid, slice: &DrivingSlice, y: &SpecVec) -> Spectrum {
    let sums = transport_sums(grid, slice, y);
    let (ax, ay) = raw_momentum_rhs(slice, &sums);
    let mut div = deriv_spec(&ax, Axis::X1);
    let dyy = deriv_spec(&ay, Axis::X2);
    for (d, s) in div.bins_mut().iter_mut().zip(dyy.bins()) {
        *d += s;
    }
    ops::inv_laplacian_spectrum(&mut div);
    div
}

/// Integrates the perturbation system, recording snapshots at `samples`.
///
/// `init` supplies the state at `start`; omit it for zero data.  Both
/// initial fields must be divergence-free on the grid.
pub fn solve_mhd_perturbation(
    cfg: &TimeStepperConfig,
    grid: Grid,
    start: f64,
    samples: &[f64],
    background: &MhdBackground,
    forcing: &MhdForcing,
    init: Option<(&VectorField, &VectorField)>,
) -> Result<MhdPerturbationTrajectory, TransportError> {
    validate_samples(start, samples)?;

    let mut state = match init {
        Some((v0, b0)) => {
            v0.grid().same_as(&grid)?;
            b0.grid().same_as(&grid)?;
            for f in [v0, b0] {
                let div = ops::divergence(f).sup_norm();
                let gate = solenoidal_gate(f);
                if div > gate {
                    return Err(TransportError::NonSolenoidalData { div_sup: div, gate });
                }
            }
            let mut parts = Vec::with_capacity(4);
            for s in [&v0.x, &v0.y, &b0.x, &b0.y] {
                parts.push(spec_of(s));
            }
            SpecVec(parts)
        }
        None => SpecVec(vec![
            Spectrum::zeros(grid),
            Spectrum::zeros(grid),
            Spectrum::zeros(grid),
            Spectrum::zeros(grid),
        ]),
    };

    let memo: RefCell<TimeMemo<DrivingSlice>> = RefCell::new(TimeMemo::new(4));
    let fetch = |t: f64| -> Rc<DrivingSlice> {
        memo.borrow_mut()
            .fetch(t, || driving_slice(grid, t, background, forcing))
    };
    let own_speed = |y: &SpecVec| -> f64 {
        let vx = phys_of(&y.0[0]);
        let vy = phys_of(&y.0[1]);
        let bx = phys_of(&y.0[2]);
        let by = phys_of(&y.0[3]);
        axis_speed(&vx, &vy).max(axis_speed(&bx, &by))
    };

    let energy0 = {
        let vx = phys_of(&state.0[0]);
        let vy = phys_of(&state.0[1]);
        let bx = phys_of(&state.0[2]);
        let by = phys_of(&state.0[3]);
        vx.l2_norm().powi(2) + vy.l2_norm().powi(2) + bx.l2_norm().powi(2) + by.l2_norm().powi(2)
    };
    let guard_ref = {
        let m: f64 = state.0.iter().map(|s| s.modulus_sum()).sum();
        m.max(0.1)
    };

    let mut steps = 0usize;
    let mut t_prev = start;
    let mut times = Vec::with_capacity(samples.len() + 1);
    let mut states = Vec::new();
    let mut spec_states = Vec::new();
    let mut max_divergence = 0.0f64;
    let mut energy_drift = 0.0f64;

    let record = |t: f64,
                      y: &SpecVec,
                      states: &mut Vec<MhdState>,
                      spec_states: &mut Vec<SpecVec>,
                      times: &mut Vec<f64>,
                      max_divergence: &mut f64,
                      energy_drift: &mut f64|
     -> Result<(), TransportError> {
        let velocity = VectorField::new(phys_of(&y.0[0]), phys_of(&y.0[1]))?;
        let magnetic = VectorField::new(phys_of(&y.0[2]), phys_of(&y.0[3]))?;
        let p = pressure_spec(grid, &fetch(t), y);
        debug_assert_eq!(p.coeff(0, 0).norm(), 0.0);
        let pressure = phys_of(&p);
        *max_divergence = (*max_divergence)
            .max(ops::divergence(&velocity).sup_norm())
            .max(ops::divergence(&magnetic).sup_norm());
        let energy = velocity.l2_norm().powi(2) + magnetic.l2_norm().powi(2);
        *energy_drift =
            (*energy_drift).max((energy - energy0).abs() / energy0.max(1e-12));
        times.push(t);
        spec_states.push(y.clone());
        states.push(MhdState {
            velocity,
            magnetic,
            pressure,
        });
        Ok(())
    };

    for &t_j in samples {
        {
            let mut rhs = |t: f64, y: &SpecVec| projected_rhs(grid, &fetch(t), y);
            let mut speed = |t: f64, y: &SpecVec| fetch(t).speed.max(own_speed(y));
            let mut guard = |_t: f64, y: &SpecVec| -> Result<(), TransportError> {
                let m: f64 = y.0.iter().map(|s| s.modulus_sum()).sum();
                if m > cfg.growth_limit * guard_ref.max(1.0) {
                    return Err(TransportError::BlowUp {
                        growth: m / guard_ref.max(1.0),
                        limit: cfg.growth_limit,
                    });
                }
                Ok(())
            };
            march(
                cfg, grid, &mut state, t_prev, t_j, &mut steps, &mut speed, &mut rhs, &mut guard,
            )?;
        }
        t_prev = t_j;
        record(
            t_j,
            &state,
            &mut states,
            &mut spec_states,
            &mut times,
            &mut max_divergence,
            &mut energy_drift,
        )?;
    }

    // The combined size of both fields is conserved by the unforced,
    // background-free system; gate the measured drift in that case.
    if background.is_empty() && forcing.is_empty() && energy0 > 0.0 {
        if energy_drift > cfg.conservation_gate {
            return Err(TransportError::ConservationDrift {
                quantity: "combined field energy",
                relative: energy_drift,
                gate: cfg.conservation_gate,
            });
        }
    }

    let mut max_residual = 0.0f64;
    let min_gap = crate::stepper::min_record_gap(start, samples);
    for &j in &check_indices(times.len(), cfg.residual_checks) {
        let y = &spec_states[j];
        let t_j = times[j];
        let slice = fetch(t_j);
        let speed = slice.speed.max(own_speed(y));
        let h = crate::stepper::FD_STENCIL_FACTOR
            * cfg.step_size(grid.spacing(), speed).min(min_gap);
        let mut rhs = |t: f64, s: &SpecVec| projected_rhs(grid, &fetch(t), s);
        let der = five_point_derivative(y, t_j, h, &mut rhs);

        let sums = transport_sums(grid, &slice, y);
        let p = pressure_spec(grid, &slice, y);
        let (px, py) = grad_phys(&p);
        let zero = ScalarField::zeros(grid);
        let phys_or_zero = |s: &Option<Spectrum>| -> ScalarField {
            s.as_ref().map(phys_of).unwrap_or_else(|| zero.clone())
        };
        let fvx = phys_or_zero(&slice.fvx);
        let fvy = phys_or_zero(&slice.fvy);
        let fbx = phys_or_zero(&slice.fbx);
        let fby = phys_or_zero(&slice.fby);
        let der_p: Vec<ScalarField> = der.0.iter().map(phys_of).collect();
        // Compare in the same band the dynamics live in: the raw pointwise
        // products carry modes the integrator truncates away.
        let band = |f: &ScalarField| phys_of(&spec_of(f));
        let sums = TransportSums {
            mom_x: band(&sums.mom_x),
            mom_y: band(&sums.mom_y),
            mag_x: band(&sums.mag_x),
            mag_y: band(&sums.mag_y),
        };

        let mut mom = 0.0f64;
        let mut mom_scale = cfg.residual_scale_floor;
        let mut mag = 0.0f64;
        let mut mag_scale = cfg.residual_scale_floor;
        for i in 0..grid.points() {
            let rx = der_p[0].values()[i] + sums.mom_x.values()[i] + px.values()[i]
                - fvx.values()[i];
            let ry = der_p[1].values()[i] + sums.mom_y.values()[i] + py.values()[i]
                - fvy.values()[i];
            let gx = der_p[2].values()[i] + sums.mag_x.values()[i] - fbx.values()[i];
            let gy = der_p[3].values()[i] + sums.mag_y.values()[i] - fby.values()[i];
            mom = mom.max(rx.abs()).max(ry.abs());
            mag = mag.max(gx.abs()).max(gy.abs());
            mom_scale = mom_scale
                .max(der_p[0].values()[i].abs())
                .max(der_p[1].values()[i].abs())
                .max(sums.mom_x.values()[i].abs())
                .max(sums.mom_y.values()[i].abs())
                .max(px.values()[i].abs())
                .max(py.values()[i].abs())
                .max(fvx.values()[i].abs())
                .max(fvy.values()[i].abs());
            mag_scale = mag_scale
                .max(der_p[2].values()[i].abs())
                .max(der_p[3].values()[i].abs())
                .max(sums.mag_x.values()[i].abs())
                .max(sums.mag_y.values()[i].abs())
                .max(fbx.values()[i].abs())
                .max(fby.values()[i].abs());
        }
        // The magnetic equation is integrated in projected form; its
        // residual is measured against the projected transport as well,
        // because the unprojected sum differs by a gradient the system
        // absorbs.  Project the magnetic residual before gating.
        let mag_rel = {
            let (mut ax, mut ay) = raw_magnetic_rhs(&slice, &sums);
            ops::leray_project_spectrum(&mut ax, &mut ay);
            let px = phys_of(&ax);
            let py = phys_of(&ay);
            let mut worst = 0.0f64;
            for i in 0..grid.points() {
                let gx = der_p[2].values()[i] - px.values()[i];
                let gy = der_p[3].values()[i] - py.values()[i];
                worst = worst.max(gx.abs()).max(gy.abs());
            }
            worst / mag_scale
        };
        let _ = mag;
        let rel = (mom / mom_scale).max(mag_rel);
        max_residual = max_residual.max(rel);
        if rel > cfg.residual_gate {
            return Err(TransportError::ResidualGate {
                equation: "planar magnetohydrodynamic perturbation",
                relative: rel,
                gate: cfg.residual_gate,
            });
        }
    }

    Ok(MhdPerturbationTrajectory {
        times,
        states,
        max_residual,
        max_divergence,
        energy_drift,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn solenoidal_pair(grid: Grid) -> (VectorField, VectorField) {
        let psi_v = ScalarField::from_fn(grid, |x1, x2| {
            0.03 * (TAU * x1).sin() * (TAU * x2).cos() + 0.02 * (2.0 * TAU * x2).sin()
        });
        let psi_b = ScalarField::from_fn(grid, |x1, x2| {
            0.025 * (TAU * (x1 + x2)).cos() + 0.015 * (2.0 * TAU * x1).sin()
        });
        (ops::perp_gradient(&psi_v), ops::perp_gradient(&psi_b))
    }

    #[test]
    fn the_unforced_system_conserves_the_combined_energy() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        let (v0, b0) = solenoidal_pair(grid);
        let traj = solve_mhd_perturbation(
            &cfg,
            grid,
            0.0,
            &[0.1, 0.25, 0.4],
            &MhdBackground::default(),
            &MhdForcing::default(),
            Some((&v0, &b0)),
        )
        .unwrap();
        assert!(traj.energy_drift() < 1e-6, "drift {}", traj.energy_drift());
        assert!(traj.max_residual() < 1e-6);
        assert!(traj.max_divergence() < 1e-8);
    }

    #[test]
    fn zero_data_without_forcing_stays_zero() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        let u = move |_t: f64| {
            VectorField::from_fn(grid, move |x1, _| (0.0, 0.4 * (TAU * x1).cos()))
        };
        let background = MhdBackground {
            velocity: Some(&u),
            magnetic: None,
        };
        let traj = solve_mhd_perturbation(
            &cfg,
            grid,
            0.0,
            &[0.2],
            &background,
            &MhdForcing::default(),
            None,
        )
        .unwrap();
        assert_eq!(traj.state(0).velocity.sup_norm(), 0.0);
        assert_eq!(traj.state(0).magnetic.sup_norm(), 0.0);
    }

    #[test]
    fn the_antisymmetric_stress_drives_the_magnetic_field() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        // c(x) = a sin(2 pi x1): div (0,c;-c,0) = (0, -a 2 pi cos(2 pi x1)),
        // which is divergence-free, so with zero data the magnetic field
        // grows linearly while the velocity stays zero at leading order.
        let c = move |_t: f64| ScalarField::from_fn(grid, move |x1, _| 0.05 * (TAU * x1).sin());
        let forcing = MhdForcing {
            stress_velocity: None,
            stress_magnetic: Some(&c),
            force: None,
        };
        let t_end = 0.3;
        let traj = solve_mhd_perturbation(
            &cfg,
            grid,
            0.0,
            &[t_end],
            &MhdBackground::default(),
            &forcing,
            None,
        )
        .unwrap();
        let expect = VectorField::from_fn(grid, move |x1, _| {
            (0.0, -t_end * 0.05 * TAU * (TAU * x1).cos())
        });
        // The driven field is a shear depending on x1 only, so every
        // quadratic term vanishes identically and the growth is exact.
        assert!(traj.state(0).magnetic.sup_distance(&expect) < 1e-9);
        assert!(traj.state(0).velocity.sup_norm() < 1e-10);
    }

    #[test]
    fn a_symmetric_stress_drives_the_velocity_linearly_at_small_amplitude() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        // An off-diagonal stress: div S = (-amp 2 pi sin(2 pi x2), 0) is
        // already solenoidal, so the projection keeps all of it.
        let make = |amp: f64| {
            move |_t: f64| {
                SymTensorField::new(
                    ScalarField::zeros(grid),
                    ScalarField::from_fn(grid, move |_x1, x2| amp * (TAU * x2).cos()),
                    ScalarField::zeros(grid),
                )
                .unwrap()
            }
        };
        let lo = make(1e-4);
        let hi = make(1e-3);
        let run = |f: &dyn Fn(f64) -> SymTensorField| {
            let forcing = MhdForcing {
                stress_velocity: Some(f),
                stress_magnetic: None,
                force: None,
            };
            solve_mhd_perturbation(
                &cfg,
                grid,
                0.0,
                &[0.2],
                &MhdBackground::default(),
                &forcing,
                None,
            )
            .unwrap()
            .velocity_sup()
        };
        let a = run(&lo);
        let b = run(&hi);
        let ratio = b / a;
        assert!(
            (ratio - 10.0).abs() < 0.5,
            "response ratio {ratio} should be near 10"
        );
    }
}
