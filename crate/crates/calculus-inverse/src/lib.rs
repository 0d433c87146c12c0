//! Right inverses of the divergence operator and the stationary-phase
//! machinery that converts oscillatory forcings into small stresses plus
//! pressure gradients.

pub mod error;
pub mod interp;
pub mod invdiv;
pub mod oscdiv;
pub mod phase;

pub use error::CalculusError;
pub use interp::Interpolant;
pub use invdiv::{inv_div_tensor, inv_div_vector};
pub use oscdiv::{osc_inverse_div, osc_inverse_div_scalar, OscDecomposition};
pub use phase::PhaseMap;
