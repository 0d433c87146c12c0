//! Band-limited periodic field algebra on the unit torus.
//!
//! Everything downstream (inverse-divergence calculus, transport solvers, the
//! iteration schemes) is built on the types and operators here: real fields on
//! a uniform power-of-two grid, spectral derivatives that are exact on
//! band-limited data, Helmholtz-Leray projection, dealiased products, and the
//! snapshot file format shared by the run pipeline.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod oracle;
pub mod snapshot;
pub mod sum;

pub use error::SpectralError;
pub use field::{ScalarField, SymTensorField, VectorField};
pub use grid::Grid;
pub use ops::Axis;
