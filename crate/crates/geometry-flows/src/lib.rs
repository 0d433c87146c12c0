//! Geometric building blocks for layered flow constructions on the
//! periodic unit cell.
//!
//! This crate supplies the deterministic, closed-form ingredients that the
//! iteration schemes assemble: admissible direction families with
//! stress-splitting coefficient functionals, stationary single-circle
//! flows with exact pressure balance, shear profiles lifted to lattice
//! lines, slotted temporal oscillators, the full zoo of temporal/spatial
//! cutoff families, and the stage-indexed parameter schedules that size
//! all of them.
//!
//! Everything is exact where exactness is load-bearing: partitions of
//! unity telescope to one in floating point, nested cutoff products
//! collapse identically, disjoint supports multiply to literal zero, and
//! lattice-aligned patterns are invariant under index translation rather
//! than approximately periodic.

pub mod cutoffs;
pub mod directions;
pub mod error;
pub mod oscillators;
pub mod profile;
pub mod schedule;
pub mod stationary;
pub mod step;

pub use cutoffs::{
    build_cutoffs, square_bump, CutoffFamily, CutoffKind, EnergyTiles, GluingPartition,
    NewtonCutoffs, SpatialCutoff, SquareBump, WindowPartition,
};
pub use directions::{
    build_direction_sets, DirectionSet, FamilyId, Frame, SymMatrix2, AMPLITUDE_FLOOR,
};
pub use error::GeometryError;
pub use oscillators::{temporal_oscillators, DirectionPolicy, TemporalOscillators, WaveKey};
pub use profile::{shear_profile, ProfileShape, ShearProfile};
pub use schedule::{
    build_schedule, GeometryMode, Ladder, ParameterSchedule, RunLayout, ScheduleSpec,
    SchemeVariant, SeparationGeometry,
};
pub use stationary::{stationary_flow, StationaryFlow};
