//! Failure modes shared by the time-dependent solvers.

use thiserror::Error;

/// Errors raised by the integrators and mollifiers.
#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),

    #[error("initial velocity is not divergence free: div sup {div_sup:.3e} exceeds {gate:.3e}")]
    NonSolenoidalData { div_sup: f64, gate: f64 },

    #[error(
        "advection speed grew mid-segment: step {dt:.3e} exceeds the stability ceiling {ceiling:.3e}"
    )]
    CflViolation { dt: f64, ceiling: f64 },

    #[error(
        "flow map gradient drifted {distortion:.3e} from the identity (limit {limit:.3e}); shorten the window"
    )]
    WindowTooLong { distortion: f64, limit: f64 },

    #[error("flow map volume defect {defect:.3e} exceeds {gate:.3e}")]
    VolumeDefect { defect: f64, gate: f64 },

    #[error("solution grew by a factor {growth:.3e} over the window (limit {limit:.3e})")]
    BlowUp { growth: f64, limit: f64 },

    #[error("{equation} residual {relative:.3e} exceeds the gate {gate:.3e}")]
    ResidualGate {
        equation: &'static str,
        relative: f64,
        gate: f64,
    },

    #[error("{quantity} drifted by a relative {relative:.3e} (gate {gate:.3e})")]
    ConservationDrift {
        quantity: &'static str,
        relative: f64,
        gate: f64,
    },

    #[error("averaging length {ell:.3e} is below the resolvable minimum {min:.3e}")]
    UnresolvableLength { ell: f64, min: f64 },

    #[error("averaging length {ell:.3e} exceeds the kernel-support ceiling {max:.3e}")]
    KernelTooWide { ell: f64, max: f64 },

    #[error(
        "averaging needs data on [{needed_start:.6}, {needed_end:.6}] but only [{have_start:.6}, {have_end:.6}] is available"
    )]
    CoverageGap {
        needed_start: f64,
        needed_end: f64,
        have_start: f64,
        have_end: f64,
    },

    #[error("sample times must be strictly increasing (violation at index {index})")]
    UnorderedSamples { index: usize },

    #[error("a solve window needs at least one sample time past the start")]
    EmptyWindow,

    #[error("step budget exhausted: the window needs more than {max} steps")]
    StepBudget { max: usize },

    #[error("time series needs at least {min} samples, got {got}")]
    SeriesTooShort { got: usize, min: usize },

    #[error("time series must advance with a uniform positive spacing (index {index})")]
    NonUniformSeries { index: usize },

    #[error("quadrature needs at least {min} nodes, got {got}")]
    TooFewNodes { got: usize, min: usize },

    #[error("composition check: the partner map is anchored at {partner:.6}, expected {expected:.6}")]
    MismatchedAnchors { partner: f64, expected: f64 },
}
