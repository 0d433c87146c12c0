//! Error taxonomy for the geometric building blocks.

use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    /// The regularity exponent lies outside the open band admitted by the
    /// chosen scheme variant.
    #[error("regularity exponent {beta} outside the admissible open interval (0, {hi})")]
    BetaBand { beta: f64, hi: f64 },

    /// A derived or supplied exponent/parameter misses its admissible band.
    #[error("parameter `{name}` = {value} outside the admissible range ({lo}, {hi})")]
    ExponentBand {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Explicit frequency ladders must be strictly increasing.
    #[error("frequency ladder is not strictly increasing at position {index}")]
    LadderNotIncreasing { index: usize },

    /// The requested time horizon layout is inconsistent.
    #[error("time layout invalid: {detail}")]
    TimeLayout { detail: String },

    /// The requested lattice radius does not admit enough distinct directions.
    #[error("radius {nu} admits too few lattice directions (need the frozen families within radius 3)")]
    InsufficientDirections { nu: u32 },

    /// A matrix argument left the admissible ball around the identity.
    #[error("matrix argument at distance {distance:.6} from the identity exceeds the admissible radius {radius:.6}")]
    OutOfBall { distance: f64, radius: f64 },

    /// Stationary-flow coefficients must be even under k -> -k.
    #[error("coefficient for direction ({}, {}) has no matching equal coefficient on the opposite direction", .k.0, .k.1)]
    AsymmetricCoefficients { k: (i64, i64) },

    /// Stationary flows require every active direction on one lattice circle.
    #[error("active directions mix lattice circles |k|^2 = {a} and |k|^2 = {b}")]
    MixedRadii { a: i64, b: i64 },

    /// A direction does not belong to the referenced family.
    #[error("direction ({}, {}) is not a member of the requested family", .k.0, .k.1)]
    UnknownDirection { k: (i64, i64) },

    /// A compactly supported profile is too narrow for the grid.
    #[error("profile support covers {points:.2} grid points across, need at least {needed:.0}")]
    UnresolvableSupport { points: f64, needed: f64 },

    /// The oscillator family does not fit in one period at the sample rate.
    #[error("{slots} oscillator slots leave fewer than {needed} samples per slot at {samples} samples per period")]
    InsufficientSlots {
        slots: usize,
        samples: usize,
        needed: usize,
    },

    /// No profile support offset avoids the corrector square's phase window.
    #[error("no admissible profile offset for direction ({}, {}): support windows cannot be separated", .k.0, .k.1)]
    NoAdmissibleOffset { k: (i64, i64) },

    /// Cutoff windows overlap or leave no interior plateau.
    #[error("cutoff windows inconsistent: {detail}")]
    OverlappingWindows { detail: String },

    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
