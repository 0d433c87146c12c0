//! Backward flow maps of a time-dependent drift, kept as periodic
//! displacements from the identity.
//!
//! With drift `u`, the map anchored at `s` solves
//!
//! ```text
//!   dPhi/dt + (u.grad) Phi = 0,    Phi(s, x) = x,
//! ```
//!
//! so `Phi(t, x)` is the anchor-time position of the trajectory passing
//! through `x` at time `t`.  Writing `Phi = x + phi` with periodic `phi`
//! turns this into a forced advection equation for `phi`, integrated here in
//! both time directions from the anchor.  The map solved with the roles of
//! anchor and evaluation time swapped is the pointwise inverse, which is what
//! [`FlowMap::composition_defect`] exploits.

use std::cell::RefCell;
use std::rc::Rc;

use calculus_inverse::interp::eval_fourier;
use calculus_inverse::phase::PhaseMap;
use spectral_core::fft::Spectrum;
use spectral_core::{Grid, ScalarField, VectorField};

use crate::config::TimeStepperConfig;
use crate::error::TransportError;
use crate::stepper::{
    advection_spec, axis_speed, five_point_derivative, grad_phys, march, phys_of, spec_of,
    SpecVec, TimeMemo,
};

/// Snap tolerance when matching times between two flow maps.
const TIME_SNAP: f64 = 1e-9;

/// A drift bundle at one stage time.
struct DriftSlice {
    ux: ScalarField,
    uy: ScalarField,
    sx: Spectrum,
    sy: Spectrum,
    speed: f64,
}

type DriftMemo = RefCell<TimeMemo<DriftSlice>>;

fn fetch_slice(
    memo: &DriftMemo,
    drift: &dyn Fn(f64) -> VectorField,
    grid: Grid,
    t: f64,
) -> Rc<DriftSlice> {
    memo.borrow_mut().fetch(t, || {
        let u = drift(t);
        debug_assert!(u.grid().same_as(&grid).is_ok());
        let sx = spec_of(&u.x);
        let sy = spec_of(&u.y);
        let ux = phys_of(&sx);
        let uy = phys_of(&sy);
        let speed = axis_speed(&ux, &uy);
        DriftSlice {
            ux,
            uy,
            sx,
            sy,
            speed,
        }
    })
}

/// Transport right-hand side `-u - (u.grad) phi` for both components.
fn transport_rhs(slice: &DriftSlice, y: &SpecVec) -> SpecVec {
    let (px, py) = grad_phys(&y.0[0]);
    let (qx, qy) = grad_phys(&y.0[1]);
    let mut ax = advection_spec(&slice.ux, &slice.uy, &px, &py);
    let mut ay = advection_spec(&slice.ux, &slice.uy, &qx, &qy);
    for (a, s) in ax.bins_mut().iter_mut().zip(slice.sx.bins()) {
        *a = -*a - s;
    }
    for (a, s) in ay.bins_mut().iter_mut().zip(slice.sy.bins()) {
        *a = -*a - s;
    }
    SpecVec(vec![ax, ay])
}

/// Flow-map samples plus their quality report.
#[derive(Debug, Clone)]
pub struct FlowMap {
    anchor: f64,
    times: Vec<f64>,
    maps: Vec<PhaseMap>,
    distortion: f64,
    volume_defect: f64,
    max_residual: f64,
    steps: usize,
}

impl FlowMap {
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn map_at(&self, j: usize) -> &PhaseMap {
        &self.maps[j]
    }

    /// Worst sup distance of the gradient from the identity over the samples.
    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    /// Worst sup of |det(gradient) - 1| over the samples.
    pub fn volume_defect(&self) -> f64 {
        self.volume_defect
    }

    /// Worst relative transport residual at the checked samples.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Index of the sample at time `t`, if present.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= TIME_SNAP * (1.0 + t.abs()))
    }

    /// Sup distance from the identity of `self` at sample `j` composed with
    /// the partner map that swaps anchor and evaluation time.
    ///
    /// `partner` must be anchored at `self.times[j]` and contain a sample at
    /// `self.anchor`.  Every `stride`-th grid point in each direction is
    /// pushed forward by the partner and pulled back by `self`, the latter by
    /// direct Fourier evaluation of the displacement off the grid.
    pub fn composition_defect(
        &self,
        j: usize,
        partner: &FlowMap,
        stride: usize,
    ) -> Result<f64, TransportError> {
        let t_j = self.times[j];
        if (partner.anchor - t_j).abs() > TIME_SNAP * (1.0 + t_j.abs()) {
            return Err(TransportError::MismatchedAnchors {
                partner: partner.anchor,
                expected: t_j,
            });
        }
        let back = partner
            .index_of(self.anchor)
            .ok_or(TransportError::MismatchedAnchors {
                partner: f64::NAN,
                expected: self.anchor,
            })?;
        let grid = self.maps[j].grid();
        grid.same_as(&partner.maps[back].grid())?;

        let forward = partner.maps[back].displacement();
        let dx_spec = spec_of(&self.maps[j].displacement().x);
        let dy_spec = spec_of(&self.maps[j].displacement().y);

        let n = grid.n();
        let stride = stride.max(1);
        let mut worst = 0.0f64;
        for i2 in (0..n).step_by(stride) {
            for i1 in (0..n).step_by(stride) {
                let (x1, x2) = grid.point(i1, i2);
                let idx = grid.index(i1, i2);
                let y1 = x1 + forward.x.values()[idx];
                let y2 = x2 + forward.y.values()[idx];
                let r1 = y1 + eval_fourier(&dx_spec, y1, y2);
                let r2 = y2 + eval_fourier(&dy_spec, y1, y2);
                let d1 = wrap_half(r1 - x1);
                let d2 = wrap_half(r2 - x2);
                worst = worst.max(d1.abs()).max(d2.abs());
            }
        }
        Ok(worst)
    }
}

/// Signed distance reduced to [-1/2, 1/2) on the unit torus.
fn wrap_half(d: f64) -> f64 {
    d - (d + 0.5).floor()
}

/// Solves the flow map of `drift` anchored at `anchor`, recording the
/// displacement at every requested sample time.  Samples may lie on either
/// side of the anchor and must be strictly increasing.
pub fn solve_flow_map(
    cfg: &TimeStepperConfig,
    grid: Grid,
    anchor: f64,
    samples: &[f64],
    drift: &dyn Fn(f64) -> VectorField,
) -> Result<FlowMap, TransportError> {
    if samples.is_empty() {
        return Err(TransportError::EmptyWindow);
    }
    for j in 1..samples.len() {
        if samples[j] <= samples[j - 1] {
            return Err(TransportError::UnorderedSamples { index: j });
        }
    }

    let memo: DriftMemo = RefCell::new(TimeMemo::new(4));
    let mut steps = 0usize;
    let mut max_residual = 0.0f64;
    let min_gap = crate::stepper::min_record_gap(anchor, samples);
    let mut recorded: Vec<(f64, VectorField)> = Vec::with_capacity(samples.len());

    // March away from the anchor in each direction present among the samples.
    let later: Vec<f64> = samples.iter().copied().filter(|&t| t > anchor).collect();
    let earlier: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&t| t < anchor)
        .rev()
        .collect();
    if samples.iter().any(|&t| t == anchor) {
        recorded.push((anchor, VectorField::zeros(grid)));
    }

    for chain in [later, earlier] {
        if chain.is_empty() {
            continue;
        }
        // Which samples of this chain get the finite-difference self-check.
        let cadence = chain.len().div_ceil(cfg.residual_checks.max(1));
        let mut state = SpecVec(vec![Spectrum::zeros(grid), Spectrum::zeros(grid)]);
        let mut t_prev = anchor;
        for (pos, &t_j) in chain.iter().enumerate() {
            {
                let mut rhs = |t: f64, y: &SpecVec| {
                    let slice = fetch_slice(&memo, drift, grid, t);
                    transport_rhs(&slice, y)
                };
                let mut speed =
                    |t: f64, _y: &SpecVec| fetch_slice(&memo, drift, grid, t).speed;
                let mut guard = |_t: f64, _y: &SpecVec| Ok(());
                march(
                    cfg, grid, &mut state, t_prev, t_j, &mut steps, &mut speed, &mut rhs,
                    &mut guard,
                )?;
            }
            t_prev = t_j;
            let disp = VectorField::new(phys_of(&state.0[0]), phys_of(&state.0[1]))?;
            recorded.push((t_j, disp));

            if pos % cadence == cadence - 1 || pos + 1 == chain.len() {
                let slice = fetch_slice(&memo, drift, grid, t_j);
                let h = crate::stepper::FD_STENCIL_FACTOR
                    * cfg.step_size(grid.spacing(), slice.speed).min(min_gap);
                let mut rhs = |t: f64, y: &SpecVec| {
                    let slice = fetch_slice(&memo, drift, grid, t);
                    transport_rhs(&slice, y)
                };
                let der = five_point_derivative(&state, t_j, h, &mut rhs);
                let (px, py) = grad_phys(&state.0[0]);
                let (qx, qy) = grad_phys(&state.0[1]);
                let ax = phys_of(&advection_spec(&slice.ux, &slice.uy, &px, &py));
                let ay = phys_of(&advection_spec(&slice.ux, &slice.uy, &qx, &qy));
                let der_x = phys_of(&der.0[0]);
                let der_y = phys_of(&der.0[1]);
                let mut res = 0.0f64;
                let mut scale = cfg.residual_scale_floor;
                for i in 0..grid.points() {
                    let rx = der_x.values()[i] + ax.values()[i] + slice.ux.values()[i];
                    let ry = der_y.values()[i] + ay.values()[i] + slice.uy.values()[i];
                    res = res.max(rx.abs()).max(ry.abs());
                    scale = scale
                        .max(der_x.values()[i].abs())
                        .max(der_y.values()[i].abs())
                        .max(slice.ux.values()[i].abs())
                        .max(slice.uy.values()[i].abs());
                }
                let rel = res / scale;
                max_residual = max_residual.max(rel);
                if rel > cfg.residual_gate {
                    return Err(TransportError::ResidualGate {
                        equation: "flow-map transport",
                        relative: rel,
                        gate: cfg.residual_gate,
                    });
                }
            }
        }
    }

    recorded.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
    let mut times = Vec::with_capacity(recorded.len());
    let mut maps = Vec::with_capacity(recorded.len());
    let mut distortion = 0.0f64;
    let mut volume_defect = 0.0f64;
    for (t, disp) in recorded {
        let map = PhaseMap::new(disp);
        distortion = distortion.max(map.distortion());
        volume_defect = volume_defect.max(map.volume_defect());
        times.push(t);
        maps.push(map);
    }
    if distortion > cfg.distortion_limit {
        return Err(TransportError::WindowTooLong {
            distortion,
            limit: cfg.distortion_limit,
        });
    }
    if volume_defect > cfg.volume_gate {
        return Err(TransportError::VolumeDefect {
            defect: volume_defect,
            gate: cfg.volume_gate,
        });
    }

    Ok(FlowMap {
        anchor,
        times,
        maps,
        distortion,
        volume_defect,
        max_residual,
        steps,
    })
}
