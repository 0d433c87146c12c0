//! Shared knobs for the explicit time steppers.

/// Step-size policy, self-check gates, and guard rails for all solvers.
///
/// Every solver advances with the classical fourth-order Runge--Kutta rule on
/// a band-limited spectral state; products are evaluated pointwise and
/// truncated back to the two-thirds band.  The step size within a segment
/// between requested sample times is `cfl * spacing / speed`, computed from
/// the advection speed at the segment start with a 25% safety margin, then
/// rounded so an integer number of steps lands exactly on the next sample.
#[derive(Debug, Clone, Copy)]
pub struct TimeStepperConfig {
    /// Courant number relating step size, grid spacing, and advection speed.
    pub cfl: f64,
    /// Floor for the advection speed in the step-size rule, so nearly
    /// quiescent fields still take finite steps.
    pub min_speed: f64,
    /// Relative gate for the finite-difference self-check of the solved
    /// equations at interior sample times.
    pub residual_gate: f64,
    /// How many interior sample times get the finite-difference self-check.
    pub residual_checks: usize,
    /// Absolute floor for the scale used to normalise residuals, so exact
    /// equilibria do not divide by rounding noise.
    pub residual_scale_floor: f64,
    /// Relative gate for conserved quadratic integrals over the window.
    pub conservation_gate: f64,
    /// Abort when the solution sup norm grows past this multiple of its
    /// reference size.
    pub growth_limit: f64,
    /// Gate for |det of the flow-map gradient - 1|.
    pub volume_gate: f64,
    /// Abort a flow-map solve when the gradient drifts this far from the
    /// identity.
    pub distortion_limit: f64,
    /// Hard cap on steps per solve, guarding against runaway step refinement.
    pub max_steps: usize,
}

impl Default for TimeStepperConfig {
    fn default() -> Self {
        TimeStepperConfig {
            cfl: 0.3,
            min_speed: 1e-3,
            residual_gate: 1e-6,
            residual_checks: 3,
            residual_scale_floor: 1e-9,
            conservation_gate: 1e-6,
            growth_limit: 10.0,
            volume_gate: 1e-8,
            distortion_limit: 0.5,
            max_steps: 4_000_000,
        }
    }
}

impl TimeStepperConfig {
    /// Step size implied by the Courant rule at the given speed, including
    /// the 25% margin for mid-segment speed growth.
    pub fn step_size(&self, spacing: f64, speed: f64) -> f64 {
        self.cfl * spacing / (1.25 * speed.max(self.min_speed))
    }

    /// Ceiling that [`step_size`](Self::step_size) must respect when the
    /// speed is re-measured mid-segment (the margin has been spent).
    pub fn step_ceiling(&self, spacing: f64, speed: f64) -> f64 {
        self.cfl * spacing / speed.max(self.min_speed)
    }
}
