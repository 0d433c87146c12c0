//! Internal stepping machinery shared by the solvers.
//!
//! States live in spectral space, truncated to the two-thirds band, so
//! derivatives and projections are exact while products go through physical
//! space and are truncated on return.  The march between two times plans an
//! integer number of equal steps from the Courant rule, re-measures the
//! advection speed every step, and re-plans when the speed outgrows the
//! safety margin.

use num_complex::Complex64;
use spectral_core::fft::{self, Spectrum};
use spectral_core::ops::{self, Axis};
use spectral_core::{Grid, ScalarField};

use crate::config::TimeStepperConfig;
use crate::error::TransportError;

/// A small vector of spectra advanced together by one RK4 integrator.
#[derive(Debug, Clone)]
pub(crate) struct SpecVec(pub Vec<Spectrum>);

impl SpecVec {
    pub fn add_scaled(&mut self, other: &SpecVec, c: f64) {
        for (dst, src) in self.0.iter_mut().zip(other.0.iter()) {
            for (d, s) in dst.bins_mut().iter_mut().zip(src.bins().iter()) {
                *d += c * s;
            }
        }
    }
}

/// Forward transform followed by band truncation.
pub(crate) fn spec_of(f: &ScalarField) -> Spectrum {
    let mut s = fft::forward(f);
    s.truncate();
    s
}

pub(crate) fn phys_of(s: &Spectrum) -> ScalarField {
    fft::inverse(s)
}

pub(crate) fn deriv_spec(s: &Spectrum, axis: Axis) -> Spectrum {
    let mut d = s.clone();
    ops::derivative_spectrum(&mut d, axis, 1);
    d
}

/// Physical-space gradient of a band-limited spectrum.
pub(crate) fn grad_phys(s: &Spectrum) -> (ScalarField, ScalarField) {
    (
        phys_of(&deriv_spec(s, Axis::X1)),
        phys_of(&deriv_spec(s, Axis::X2)),
    )
}

/// Spectrum of the advection term `u . grad f` from physical factors.
pub(crate) fn advection_spec(
    ux: &ScalarField,
    uy: &ScalarField,
    fx: &ScalarField,
    fy: &ScalarField,
) -> Spectrum {
    let grid = ux.grid();
    let mut prod = ScalarField::zeros(grid);
    {
        let out = prod.values_mut();
        let (a, b) = (ux.values(), uy.values());
        let (gx, gy) = (fx.values(), fy.values());
        for i in 0..out.len() {
            out[i] = a[i] * gx[i] + b[i] * gy[i];
        }
    }
    spec_of(&prod)
}

/// Largest per-axis speed of a velocity given in physical space.
pub(crate) fn axis_speed(ux: &ScalarField, uy: &ScalarField) -> f64 {
    ux.sup_norm().max(uy.sup_norm())
}

/// One classical RK4 step; `rhs` must be side-effect free in the state.
pub(crate) fn rk4_step(
    state: &SpecVec,
    t: f64,
    dt: f64,
    rhs: &mut (impl FnMut(f64, &SpecVec) -> SpecVec + ?Sized),
) -> SpecVec {
    let th = t + 0.5 * dt;
    let te = t + dt;
    let k1 = rhs(t, state);
    let mut y = state.clone();
    y.add_scaled(&k1, 0.5 * dt);
    let k2 = rhs(th, &y);
    let mut y = state.clone();
    y.add_scaled(&k2, 0.5 * dt);
    let k3 = rhs(th, &y);
    let mut y = state.clone();
    y.add_scaled(&k3, dt);
    let k4 = rhs(te, &y);
    let mut out = state.clone();
    out.add_scaled(&k1, dt / 6.0);
    out.add_scaled(&k2, dt / 3.0);
    out.add_scaled(&k3, dt / 3.0);
    out.add_scaled(&k4, dt / 6.0);
    out
}

/// Advances `state` from `from` to `to` (either direction), stopping exactly
/// on `to`.  `speed_of` is consulted at every step for the Courant rule and
/// `guard` runs after every step (blow-up checks live there).
#[allow(clippy::too_many_arguments)]
pub(crate) fn march(
    cfg: &TimeStepperConfig,
    grid: Grid,
    state: &mut SpecVec,
    from: f64,
    to: f64,
    steps_used: &mut usize,
    speed_of: &mut impl FnMut(f64, &SpecVec) -> f64,
    rhs: &mut impl FnMut(f64, &SpecVec) -> SpecVec,
    guard: &mut impl FnMut(f64, &SpecVec) -> Result<(), TransportError>,
) -> Result<(), TransportError> {
    let span = to - from;
    if span == 0.0 {
        return Ok(());
    }
    let spacing = grid.spacing();
    let mut t = from;
    let mut remaining = span.abs();
    let dir = span.signum();
    let mut replans = 0usize;
    while remaining > 0.0 {
        let speed = speed_of(t, state);
        let dt_mag = cfg.step_size(spacing, speed).min(remaining);
        let plan_steps = (remaining / dt_mag).ceil().max(1.0);
        if plan_steps > (cfg.max_steps - *steps_used) as f64 {
            return Err(TransportError::StepBudget { max: cfg.max_steps });
        }
        let plan_steps = plan_steps as usize;
        let dt = dir * remaining / plan_steps as f64;
        let mut broke = false;
        for i in 0..plan_steps {
            if i > 0 {
                let speed_now = speed_of(t, state);
                if dt.abs() > cfg.step_ceiling(spacing, speed_now) {
                    replans += 1;
                    if replans > 8 {
                        return Err(TransportError::CflViolation {
                            dt: dt.abs(),
                            ceiling: cfg.step_ceiling(spacing, speed_now),
                        });
                    }
                    broke = true;
                    break;
                }
            }
            let last = i + 1 == plan_steps;
            // Land exactly on the segment end despite rounding drift.
            let dt_step = if last { to - t } else { dt };
            *state = rk4_step(state, t, dt_step, rhs);
            *steps_used += 1;
            t = if last { to } else { t + dt };
            remaining = (to - t).abs();
            guard(t, state)?;
        }
        if !broke {
            break;
        }
    }
    Ok(())
}

/// Stencil spacing for the self-check derivative, as a fraction of the
/// Courant step.  Small enough that the fourth-order stencil truncation
/// sits two decades under the residual gates; large enough that the
/// division by `12 h` does not amplify rounding.
pub(crate) const FD_STENCIL_FACTOR: f64 = 0.1;

/// Smallest gap between consecutive record times, counting the leg from the
/// window start to the first sample.  Callers announce the finest timescale
/// they care about through their sample lattice, so the self-check stencil
/// must never straddle more than a fraction of one lattice cell; otherwise
/// forcing that oscillates faster than the advective Courant step would be
/// invisible to the derivative probe.  Direction-agnostic, so backward
/// marches are handled too.
pub(crate) fn min_record_gap(start: f64, times: &[f64]) -> f64 {
    let mut prev = start;
    let mut gap = f64::INFINITY;
    for &t in times {
        let leg = (t - prev).abs();
        if leg > 0.0 {
            gap = gap.min(leg);
        }
        prev = t;
    }
    gap
}

/// Fourth-order five-point derivative of the state path at `t`, using short
/// RK4 excursions of size `h` in both directions from the recorded state.
pub(crate) fn five_point_derivative(
    center: &SpecVec,
    t: f64,
    h: f64,
    rhs: &mut impl FnMut(f64, &SpecVec) -> SpecVec,
) -> SpecVec {
    let hop = |from: &SpecVec, at: f64, dh: f64, rhs: &mut dyn FnMut(f64, &SpecVec) -> SpecVec| {
        // Two sub-steps per hop keep the integration error far below the
        // stencil truncation.
        let mid = rk4_step(from, at, 0.5 * dh, rhs);
        rk4_step(&mid, at + 0.5 * dh, 0.5 * dh, rhs)
    };
    let p1 = hop(center, t, h, rhs);
    let p2 = hop(&p1, t + h, h, rhs);
    let m1 = hop(center, t, -h, rhs);
    let m2 = hop(&m1, t - h, -h, rhs);
    let mut out = m2;
    out.add_scaled(&p2, -1.0);
    for s in out.0.iter_mut() {
        for c in s.bins_mut() {
            *c *= Complex64::new(1.0 / (12.0 * h), 0.0);
        }
    }
    out.add_scaled(&p1, 8.0 / (12.0 * h));
    out.add_scaled(&m1, -8.0 / (12.0 * h));
    out
}

/// Caches a handful of recently built time-keyed bundles (stage times repeat
/// within and across RK4 steps).
pub(crate) struct TimeMemo<T> {
    items: Vec<(f64, std::rc::Rc<T>)>,
    cap: usize,
}

impl<T> TimeMemo<T> {
    pub fn new(cap: usize) -> Self {
        TimeMemo {
            items: Vec::with_capacity(cap),
            cap,
        }
    }

    pub fn fetch(&mut self, t: f64, make: impl FnOnce() -> T) -> std::rc::Rc<T> {
        if let Some((_, v)) = self.items.iter().find(|(s, _)| *s == t) {
            return v.clone();
        }
        let v = std::rc::Rc::new(make());
        if self.items.len() == self.cap {
            self.items.remove(0);
        }
        self.items.push((t, v.clone()));
        v
    }
}
