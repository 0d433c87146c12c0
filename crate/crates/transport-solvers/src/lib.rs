//! Time integration for the transport systems of the construction.
//!
//! Everything here advances band-limited fields on the unit torus with a
//! fourth-order explicit scheme over spectral right-hand sides, and every
//! solver double-checks its own output: residuals of the governing
//! equations are measured with an independent finite-difference stencil in
//! time, conserved quantities are tracked, and constraint violations
//! (divergence, mean values, volume distortion) are gated.
//!
//! The pieces:
//!
//! - [`solve_euler_tracer`]: the incompressible planar flow with a passive
//!   scalar riding on it.
//! - [`solve_flow_map`]: backward flow maps of a drift, as periodic
//!   displacements, with composition and distortion diagnostics.
//! - [`solve_newton_system`]: the linearized advection pair driven by
//!   oscillatory forcing, integrated from zero data.
//! - [`solve_mhd_perturbation`]: the planar magnetohydrodynamic
//!   perturbation system around prescribed backgrounds.
//! - [`SpatialMollifier`] and [`mollify_along_flow`]: spatial smoothing
//!   with exactly vanishing discrete moments, and temporal averaging along
//!   a flow.
//!
//! Solvers accept any strictly increasing list of sample times and return
//! snapshots at exactly those times; marching between samples plans its
//! own step counts from a advective stability bound and lands on the
//! sample times exactly.  Repeated runs are bitwise reproducible.

pub mod config;
pub mod error;
pub mod euler;
pub mod flowmap;
pub mod mhd;
pub mod mollify;
pub mod newton;
pub mod series;

mod stepper;

pub use config::TimeStepperConfig;
pub use error::TransportError;
pub use euler::{solve_euler_tracer, stationary_shear, EulerTracerState, EulerTracerTrajectory};
pub use flowmap::{solve_flow_map, FlowMap};
pub use mhd::{
    solve_mhd_perturbation, MhdBackground, MhdForcing, MhdPerturbationTrajectory, MhdState,
};
pub use mollify::{mollify_along_flow, mollify_scalar_along_flow, SpatialMollifier};
pub use newton::{
    solve_newton_system, LinearizedBackground, LinearizedForcing, NewtonState, NewtonTrajectory,
};
pub use series::{LinearField, TimeSeries};
