//! Ideal incompressible flow with a passively advected scalar.
//!
//! The system is
//!
//! ```text
//!   dv/dt + (v.grad) v + grad p = 0,    div v = 0,
//!   dth/dt + (v.grad) th = 0,
//! ```
//!
//! integrated pseudo-spectrally: the velocity equation is closed with the
//! solenoidal projection, and the pressure reported at sample times is the
//! unique mean-free solution of  -lap p = div((v.grad) v).

use spectral_core::fft::Spectrum;
use spectral_core::ops::{self, Axis};
use spectral_core::{Grid, ScalarField, VectorField};

use crate::config::TimeStepperConfig;
use crate::error::TransportError;
use crate::stepper::{
    advection_spec, axis_speed, five_point_derivative, grad_phys, march, phys_of, spec_of, SpecVec,
};

/// One snapshot of the flow.
#[derive(Debug, Clone)]
pub struct EulerTracerState {
    pub velocity: VectorField,
    pub tracer: ScalarField,
    pub pressure: ScalarField,
}

/// Flow snapshots at the requested sample times, plus the self-check report.
#[derive(Debug, Clone)]
pub struct EulerTracerTrajectory {
    times: Vec<f64>,
    states: Vec<EulerTracerState>,
    max_residual: f64,
    energy_drift: f64,
    tracer_drift: f64,
    steps: usize,
}

impl EulerTracerTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, j: usize) -> &EulerTracerState {
        &self.states[j]
    }

    /// Worst relative residual of the two equations over the checked times.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Worst relative drift of the kinetic energy over the window.
    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }

    /// Worst relative drift of the tracer square integral over the window.
    pub fn tracer_drift(&self) -> f64 {
        self.tracer_drift
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Kinetic energy at sample `j`.
    pub fn kinetic_energy(&self, j: usize) -> f64 {
        let n = self.states[j].velocity.l2_norm();
        n * n
    }

    /// Square integral of the tracer at sample `j`.
    pub fn tracer_mass(&self, j: usize) -> f64 {
        let n = self.states[j].tracer.l2_norm();
        n * n
    }
}

/// Divergence gate applied to the initial velocity, scaled by its size.
pub(crate) fn solenoidal_gate(v: &VectorField) -> f64 {
    1e-8 * v.sup_norm().max(1.0)
}

/// Shared validation: strictly increasing samples, none before the start.
pub(crate) fn validate_samples(start: f64, samples: &[f64]) -> Result<(), TransportError> {
    if samples.is_empty() {
        return Err(TransportError::EmptyWindow);
    }
    if samples[0] < start {
        return Err(TransportError::UnorderedSamples { index: 0 });
    }
    for j in 1..samples.len() {
        if samples[j] <= samples[j - 1] {
            return Err(TransportError::UnorderedSamples { index: j });
        }
    }
    Ok(())
}

/// Indices (into `samples`) that get the finite-difference self-check.
pub(crate) fn check_indices(count: usize, checks: usize) -> Vec<usize> {
    if checks == 0 || count == 0 {
        return Vec::new();
    }
    if count < 3 {
        return vec![count - 1];
    }
    let interior = count - 2;
    let picks = checks.min(interior);
    (0..picks)
        .map(|c| 1 + (c * interior) / picks + (interior / picks) / 2)
        .map(|i| i.min(count - 2))
        .collect()
}

struct EulerRhs;

impl EulerRhs {
    /// Unprojected advection spectra of velocity and tracer.
    fn advection(&self, y: &SpecVec) -> (Spectrum, Spectrum, Spectrum) {
        let vx = phys_of(&y.0[0]);
        let vy = phys_of(&y.0[1]);
        let (gxx, gxy) = grad_phys(&y.0[0]);
        let (gyx, gyy) = grad_phys(&y.0[1]);
        let (tx, ty) = grad_phys(&y.0[2]);
        (
            advection_spec(&vx, &vy, &gxx, &gxy),
            advection_spec(&vx, &vy, &gyx, &gyy),
            advection_spec(&vx, &vy, &tx, &ty),
        )
    }

    fn eval(&self, y: &SpecVec) -> SpecVec {
        let (mut ax, mut ay, at) = self.advection(y);
        ops::leray_project_spectrum(&mut ax, &mut ay);
        for s in [&mut ax, &mut ay] {
            for c in s.bins_mut() {
                *c = -*c;
            }
        }
        let mut att = at;
        for c in att.bins_mut() {
            *c = -*c;
        }
        SpecVec(vec![ax, ay, att])
    }

    /// Mean-free pressure spectrum for the recorded state.
    fn pressure(&self, y: &SpecVec) -> Spectrum {
        let (ax, ay, _) = self.advection(y);
        let mut div = crate::stepper::deriv_spec(&ax, Axis::X1);
        let dy = crate::stepper::deriv_spec(&ay, Axis::X2);
        for (d, s) in div.bins_mut().iter_mut().zip(dy.bins().iter()) {
            *d += s;
        }
        ops::inv_laplacian_spectrum(&mut div);
        for c in div.bins_mut() {
            *c = -*c;
        }
        div
    }
}

/// Integrates the flow from `(v0, th0)` at time `start` and records snapshots
/// at `samples` (strictly increasing, all at or after `start`).
pub fn solve_euler_tracer(
    cfg: &TimeStepperConfig,
    v0: &VectorField,
    th0: &ScalarField,
    start: f64,
    samples: &[f64],
) -> Result<EulerTracerTrajectory, TransportError> {
    let grid = v0.grid();
    v0.grid().same_as(&th0.grid())?;
    validate_samples(start, samples)?;

    let div_sup = ops::divergence(v0).sup_norm();
    let gate = solenoidal_gate(v0);
    if div_sup > gate {
        return Err(TransportError::NonSolenoidalData { div_sup, gate });
    }

    let rhs_def = EulerRhs;
    let mut state = SpecVec(vec![spec_of(&v0.x), spec_of(&v0.y), spec_of(th0)]);
    let guard_ref = state.0[0]
        .modulus_sum()
        .max(state.0[1].modulus_sum())
        .max(0.1);

    let energy0 = {
        let v = VectorField::new(phys_of(&state.0[0]), phys_of(&state.0[1]))?;
        let n = v.l2_norm();
        n * n
    };
    let tracer0 = {
        let n = phys_of(&state.0[2]).l2_norm();
        n * n
    };

    let mut steps = 0usize;
    let mut t_prev = start;
    let mut times = Vec::with_capacity(samples.len());
    let mut states = Vec::with_capacity(samples.len());
    let mut spec_states: Vec<SpecVec> = Vec::with_capacity(samples.len());
    let mut energy_drift = 0.0f64;
    let mut tracer_drift = 0.0f64;

    for &t_j in samples {
        let mut rhs = |_t: f64, y: &SpecVec| rhs_def.eval(y);
        let mut speed = |_t: f64, y: &SpecVec| {
            let vx = phys_of(&y.0[0]);
            let vy = phys_of(&y.0[1]);
            axis_speed(&vx, &vy)
        };
        let mut guard = |_t: f64, y: &SpecVec| {
            let m = y.0[0].modulus_sum().max(y.0[1].modulus_sum());
            if m > cfg.growth_limit * guard_ref {
                return Err(TransportError::BlowUp {
                    growth: m / guard_ref,
                    limit: cfg.growth_limit,
                });
            }
            Ok(())
        };
        march(
            cfg, grid, &mut state, t_prev, t_j, &mut steps, &mut speed, &mut rhs, &mut guard,
        )?;
        t_prev = t_j;

        let velocity = VectorField::new(phys_of(&state.0[0]), phys_of(&state.0[1]))?;
        let tracer = phys_of(&state.0[2]);
        let pressure = phys_of(&rhs_def.pressure(&state));

        let e = {
            let n = velocity.l2_norm();
            n * n
        };
        let m = {
            let n = tracer.l2_norm();
            n * n
        };
        energy_drift = energy_drift.max((e - energy0).abs() / (energy0 + 1e-12));
        tracer_drift = tracer_drift.max((m - tracer0).abs() / (tracer0 + 1e-12));

        times.push(t_j);
        spec_states.push(state.clone());
        states.push(EulerTracerState {
            velocity,
            tracer,
            pressure,
        });
    }

    if energy_drift > cfg.conservation_gate {
        return Err(TransportError::ConservationDrift {
            quantity: "kinetic energy",
            relative: energy_drift,
            gate: cfg.conservation_gate,
        });
    }
    if tracer_drift > cfg.conservation_gate {
        return Err(TransportError::ConservationDrift {
            quantity: "tracer square integral",
            relative: tracer_drift,
            gate: cfg.conservation_gate,
        });
    }

    let mut max_residual = 0.0f64;
    let min_gap = crate::stepper::min_record_gap(start, samples);
    for &j in &check_indices(times.len(), cfg.residual_checks) {
        let y = &spec_states[j];
        let t_j = times[j];
        let vx = phys_of(&y.0[0]);
        let vy = phys_of(&y.0[1]);
        let h = crate::stepper::FD_STENCIL_FACTOR
            * cfg.step_size(grid.spacing(), axis_speed(&vx, &vy)).min(min_gap);
        let mut rhs = |_t: f64, s: &SpecVec| rhs_def.eval(s);
        let der = five_point_derivative(y, t_j, h, &mut rhs);

        let (ax, ay, at) = rhs_def.advection(y);
        let p = rhs_def.pressure(y);
        let (px, py) = grad_phys(&p);
        let der_x = phys_of(&der.0[0]);
        let der_y = phys_of(&der.0[1]);
        let der_t = phys_of(&der.0[2]);
        let ax_p = phys_of(&ax);
        let ay_p = phys_of(&ay);
        let at_p = phys_of(&at);

        let mut mom = 0.0f64;
        let mut mom_scale = cfg.residual_scale_floor;
        for i in 0..grid.points() {
            let rx = der_x.values()[i] + ax_p.values()[i] + px.values()[i];
            let ry = der_y.values()[i] + ay_p.values()[i] + py.values()[i];
            mom = mom.max(rx.abs()).max(ry.abs());
            mom_scale = mom_scale
                .max(der_x.values()[i].abs())
                .max(der_y.values()[i].abs())
                .max(ax_p.values()[i].abs())
                .max(ay_p.values()[i].abs())
                .max(px.values()[i].abs())
                .max(py.values()[i].abs());
        }
        let mut tra = 0.0f64;
        let mut tra_scale = cfg.residual_scale_floor;
        for i in 0..grid.points() {
            let r = der_t.values()[i] + at_p.values()[i];
            tra = tra.max(r.abs());
            tra_scale = tra_scale
                .max(der_t.values()[i].abs())
                .max(at_p.values()[i].abs());
        }
        let rel = (mom / mom_scale).max(tra / tra_scale);
        max_residual = max_residual.max(rel);
        if rel > cfg.residual_gate {
            return Err(TransportError::ResidualGate {
                equation: "ideal flow with tracer",
                relative: rel,
                gate: cfg.residual_gate,
            });
        }
    }

    Ok(EulerTracerTrajectory {
        times,
        states,
        max_residual,
        energy_drift,
        tracer_drift,
        steps,
    })
}

/// A stationary shear column: `v = (0, A cos(2 pi k x1))` with the tracer
/// carrying the same profile.  An exact equilibrium of the system.
pub fn stationary_shear(
    grid: Grid,
    amplitude: f64,
    wavenumber: i64,
) -> (VectorField, ScalarField) {
    let profile = ScalarField::from_fn(grid, |x1, _| {
        amplitude * (2.0 * std::f64::consts::PI * wavenumber as f64 * x1).cos()
    });
    let v = VectorField::new(ScalarField::zeros(grid), profile.clone()).expect("same grid");
    (v, profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_shear_equilibrium_is_preserved_exactly() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        let (v0, th0) = stationary_shear(grid, 0.8, 3);
        let samples = [0.1, 0.25, 0.4];
        let traj = solve_euler_tracer(&cfg, &v0, &th0, 0.0, &samples).unwrap();
        for j in 0..traj.len() {
            assert!(traj.state(j).velocity.sup_distance(&v0) < 1e-10);
            assert!(traj.state(j).tracer.sup_distance(&th0) < 1e-10);
        }
        assert!(traj.max_residual() < 1e-6);
    }

    #[test]
    fn a_smooth_flow_conserves_energy_and_reports_small_residuals() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        // A gentle two-mode solenoidal field via a stream function.
        let psi = ScalarField::from_fn(grid, |x1, x2| {
            0.03 * (2.0 * std::f64::consts::PI * x1).sin() * (2.0 * std::f64::consts::PI * x2).cos()
                + 0.02 * (4.0 * std::f64::consts::PI * (x1 + x2)).sin()
        });
        let v0 = ops::perp_gradient(&psi);
        let th0 = ScalarField::from_fn(grid, |x1, x2| {
            0.5 * (2.0 * std::f64::consts::PI * x2).cos()
                + 0.1 * (2.0 * std::f64::consts::PI * (x1 - x2)).sin()
        });
        let samples: Vec<f64> = (1..=8).map(|j| 0.05 * j as f64).collect();
        let traj = solve_euler_tracer(&cfg, &v0, &th0, 0.0, &samples).unwrap();
        assert!(traj.energy_drift() < 1e-6);
        assert!(traj.tracer_drift() < 1e-6);
        assert!(traj.max_residual() < 1e-6);
        assert!(traj.steps() > 8);
    }

    #[test]
    fn non_solenoidal_data_is_rejected() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        let bad = VectorField::from_fn(grid, |x1, _| {
            ((2.0 * std::f64::consts::PI * x1).sin(), 0.0)
        });
        let th0 = ScalarField::zeros(grid);
        let err = solve_euler_tracer(&cfg, &bad, &th0, 0.0, &[0.1]).unwrap_err();
        assert!(matches!(err, TransportError::NonSolenoidalData { .. }));
    }

    #[test]
    fn the_blow_up_guard_fires_when_the_limit_is_tiny() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig {
            growth_limit: 1.0 + 1e-9,
            conservation_gate: 1.0,
            ..TimeStepperConfig::default()
        };
        // Two incommensurate eigenmodes make the flow genuinely unsteady,
        // so its mode-sum proxy moves above the starting value at once.
        let psi = ScalarField::from_fn(grid, |x1, x2| {
            let tau = 2.0 * std::f64::consts::PI;
            0.3 * (tau * x1).sin() * (tau * x2).cos() + 0.1 * (2.0 * tau * x1).sin()
        });
        let v0 = ops::perp_gradient(&psi);
        let th0 = ScalarField::zeros(grid);
        let err = solve_euler_tracer(&cfg, &v0, &th0, 0.0, &[0.5]).unwrap_err();
        assert!(matches!(err, TransportError::BlowUp { .. }));
    }

    #[test]
    fn sample_validation_rejects_disorder() {
        let grid = Grid::new(32).unwrap();
        let cfg = TimeStepperConfig::default();
        let (v0, th0) = stationary_shear(grid, 0.1, 1);
        let err = solve_euler_tracer(&cfg, &v0, &th0, 0.0, &[0.2, 0.1]).unwrap_err();
        assert!(matches!(err, TransportError::UnorderedSamples { index: 1 }));
    }
}
