//! Stage-indexed parameter schedules for the two construction variants.
//!
//! A schedule owns the frequency ladder `lambda_q`, the amplitude ladder
//! `delta_q`, and the derived time/length scales (`tau_q`, `mu_q`, `ell_q`,
//! per-level amplitudes) that every downstream module keys off.  Desk runs
//! use small explicit integer ladders so lattice phases stay exact;
//! generated ladders (`lambda_q = a^(b^q)`) exist for regime audits and are
//! evaluated in log space, never on a grid.
//!
//! Stages are 1-based: `lambda(1)` is the first ladder entry.  Explicit
//! ladders extend past their last entry by repeating the final ratio, so
//! accessors for stage `q+1` quantities remain total.

use crate::error::GeometryError;

/// Which construction the schedule drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeVariant {
    /// Two-dimensional velocity plus transported scalar, built by glued
    /// exact flows with corrective (Newton) and oscillatory (Nash) layers.
    NewtonNash,
    /// Two-dimensional ideal-MHD construction with spatially separated
    /// supports.
    Separation,
}

/// Time layout of a Newton-Nash run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunLayout {
    /// Perturb only a middle band of the horizon, leaving the ends frozen.
    Freeze,
    /// Perturb all windows across the horizon to steer the energy profile.
    Energy,
}

/// Frequency ladder specification.
#[derive(Clone, Debug)]
pub enum Ladder {
    /// Integer frequencies, strictly increasing; exact on lattices.
    Explicit(Vec<u64>),
    /// `lambda_q = a^(b^q)`; audit-only, evaluated in log space.
    Generated { a: f64, b: f64 },
}

/// How the separation variant's spatial geometry is sized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryMode {
    /// Fixed desk-scale units: plateau fraction and ramp unit are given.
    DeskUnits { epsilon0: f64, u_base: f64 },
    /// Derived from the ladder: `epsilon0 = lambda_1^(-1/20)` and ramp
    /// units shrinking like `lambda_q^(-1/30)`.
    Formula,
}

/// User-facing schedule specification.
#[derive(Clone, Debug)]
pub struct ScheduleSpec {
    pub variant: SchemeVariant,
    pub layout: RunLayout,
    /// Regularity exponent; open band depends on the variant.
    pub beta: f64,
    /// Mollification/CFL exponent; desk runs record it as given, generated
    /// ladders validate it against the derived band.
    pub alpha: f64,
    /// Number of corrective levels per stage.
    pub levels: u32,
    pub ladder: Ladder,
    /// Total time horizon T.
    pub horizon: f64,
    /// Quiet band at each end of the horizon (Freeze layout); must satisfy
    /// 0 < quiet <= T/4.
    pub quiet_band: f64,
    /// Spatial geometry sizing for the separation variant.
    pub geometry: GeometryMode,
}

impl ScheduleSpec {
    /// Frozen desk-scale parameters for the Newton-Nash variant.
    pub fn desk_newton_nash(layout: RunLayout) -> Self {
        let horizon = match layout {
            RunLayout::Freeze => 8.0,
            RunLayout::Energy => 4.0,
        };
        let quiet_band = match layout {
            RunLayout::Freeze => 2.0,
            RunLayout::Energy => 1.0,
        };
        ScheduleSpec {
            variant: SchemeVariant::NewtonNash,
            layout,
            beta: 0.3,
            alpha: 0.01,
            levels: 2,
            ladder: Ladder::Explicit(vec![1, 2, 4]),
            horizon,
            quiet_band,
            geometry: GeometryMode::DeskUnits { epsilon0: 0.25, u_base: 0.012 },
        }
    }

    /// Frozen desk-scale parameters for the separation variant.
    pub fn desk_separation() -> Self {
        ScheduleSpec {
            variant: SchemeVariant::Separation,
            layout: RunLayout::Energy,
            beta: 0.1,
            alpha: 0.01,
            levels: 1,
            ladder: Ladder::Explicit(vec![4, 8, 16]),
            horizon: 1.0,
            quiet_band: 0.25,
            geometry: GeometryMode::DeskUnits { epsilon0: 0.25, u_base: 0.012 },
        }
    }
}

/// Spatial geometry of the separation variant at one stage.
#[derive(Clone, Copy, Debug)]
pub struct SeparationGeometry {
    /// Overall plateau budget fraction.
    pub epsilon0: f64,
    /// Ramp unit at this stage.
    pub unit: f64,
    /// Half-width of the guaranteed plateau core.
    pub plateau_half: f64,
    /// Half-width where the central plateau still equals one.
    pub inner_half: f64,
    /// Half-width beyond which the profile has fully decayed.
    pub outer_half: f64,
}

/// Validated schedule with memoized base quantities.
#[derive(Clone, Debug)]
pub struct ParameterSchedule {
    spec: ScheduleSpec,
}

/// Validate a specification and wrap it as a schedule.
pub fn build_schedule(spec: ScheduleSpec) -> Result<ParameterSchedule, GeometryError> {
    let beta_hi = match spec.variant {
        SchemeVariant::NewtonNash => 1.0 / 3.0,
        SchemeVariant::Separation => 1.0 / 5.0,
    };
    if !(spec.beta > 0.0 && spec.beta < beta_hi) {
        return Err(GeometryError::BetaBand { beta: spec.beta, hi: beta_hi });
    }
    if !(spec.alpha > 0.0) {
        return Err(GeometryError::ExponentBand {
            name: "alpha",
            value: spec.alpha,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if spec.levels == 0 {
        return Err(GeometryError::ExponentBand {
            name: "levels",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if !(spec.horizon > 0.0) {
        return Err(GeometryError::TimeLayout {
            detail: format!("horizon {} must be positive", spec.horizon),
        });
    }
    if !(spec.quiet_band > 0.0 && spec.quiet_band <= spec.horizon / 4.0) {
        return Err(GeometryError::TimeLayout {
            detail: format!(
                "quiet band {} must lie in (0, horizon/4 = {}]",
                spec.quiet_band,
                spec.horizon / 4.0
            ),
        });
    }
    match &spec.ladder {
        Ladder::Explicit(entries) => {
            if entries.is_empty() || entries[0] == 0 {
                return Err(GeometryError::LadderNotIncreasing { index: 0 });
            }
            for i in 1..entries.len() {
                if entries[i] <= entries[i - 1] {
                    return Err(GeometryError::LadderNotIncreasing { index: i });
                }
            }
            if entries.len() >= 2 {
                let last = entries[entries.len() - 1];
                let prev = entries[entries.len() - 2];
                if last % prev != 0 {
                    return Err(GeometryError::LadderNotIncreasing {
                        index: entries.len() - 1,
                    });
                }
            }
        }
        Ladder::Generated { a, b } => {
            if !(*a > 1.0) {
                return Err(GeometryError::ExponentBand {
                    name: "a",
                    value: *a,
                    lo: 1.0,
                    hi: f64::INFINITY,
                });
            }
            let b_hi = match spec.variant {
                SchemeVariant::NewtonNash => {
                    (1.0 + (1.0 - 3.0 * spec.beta) / (12.0 * spec.beta)).min(1.5)
                }
                SchemeVariant::Separation => {
                    ((1.0 - spec.beta) / (4.0 * spec.beta)).min(1.5)
                }
            };
            if !(*b > 1.0 && *b <= b_hi) {
                return Err(GeometryError::ExponentBand {
                    name: "b",
                    value: *b,
                    lo: 1.0,
                    hi: b_hi,
                });
            }
            let alpha_hi = match spec.variant {
                SchemeVariant::NewtonNash => {
                    let x = newton_nash_gain_exponent(spec.beta, *b);
                    let by_gain = -x / (100.0 * spec.levels as f64);
                    let by_band = (*b - 1.0) * spec.beta * (1.0 / 3.0 - spec.beta)
                        / (100.0 * spec.levels as f64);
                    (1.0f64 / 100.0).min(by_gain).min(by_band)
                }
                SchemeVariant::Separation => {
                    let x = 2.0 * spec.beta * b * b - (0.5 + 1.5 * spec.beta) * b + 0.5
                        - 0.5 * spec.beta;
                    (1.0f64 / 100.0).min(-x / 10.0)
                }
            };
            if !(spec.alpha < alpha_hi) {
                return Err(GeometryError::ExponentBand {
                    name: "alpha",
                    value: spec.alpha,
                    lo: 0.0,
                    hi: alpha_hi,
                });
            }
        }
    }
    Ok(ParameterSchedule { spec })
}

/// Exponent controlling the per-level corrective gain in the Newton-Nash
/// variant; must be negative for the scheme to make progress.
pub fn newton_nash_gain_exponent(beta: f64, b: f64) -> f64 {
    2.0 * beta * b * b - b * (3.0 * beta + 1.0 / 3.0) + beta + 1.0 / 3.0
}

impl ParameterSchedule {
    pub fn spec(&self) -> &ScheduleSpec {
        &self.spec
    }

    pub fn variant(&self) -> SchemeVariant {
        self.spec.variant
    }

    pub fn layout(&self) -> RunLayout {
        self.spec.layout
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn levels(&self) -> u32 {
        self.spec.levels
    }

    pub fn horizon(&self) -> f64 {
        self.spec.horizon
    }

    pub fn quiet_band(&self) -> f64 {
        self.spec.quiet_band
    }

    /// Number of explicitly listed stages (None for generated ladders).
    pub fn explicit_stage_count(&self) -> Option<usize> {
        match &self.spec.ladder {
            Ladder::Explicit(v) => Some(v.len()),
            Ladder::Generated { .. } => None,
        }
    }

    /// Frequency at stage q (1-based); explicit ladders extend by their
    /// final ratio beyond the listed entries.
    pub fn lambda(&self, q: usize) -> f64 {
        assert!(q >= 1, "stages are 1-based");
        match &self.spec.ladder {
            Ladder::Explicit(v) => self
                .extended_entry(v, q)
                .map(|x| x as f64)
                .unwrap_or(f64::INFINITY),
            Ladder::Generated { a, b } => (b.powi(q as i32) * a.ln()).exp(),
        }
    }

    /// Integer frequency at stage q; only explicit ladders support this.
    pub fn lambda_int(&self, q: usize) -> Result<u64, GeometryError> {
        assert!(q >= 1, "stages are 1-based");
        match &self.spec.ladder {
            Ladder::Explicit(v) => self.extended_entry(v, q).ok_or_else(|| {
                GeometryError::TimeLayout {
                    detail: format!("frequency at stage {q} overflows the integer ladder"),
                }
            }),
            Ladder::Generated { .. } => Err(GeometryError::TimeLayout {
                detail: "generated ladders are audit-only; lattice work needs explicit integers"
                    .to_string(),
            }),
        }
    }

    fn extended_entry(&self, v: &[u64], q: usize) -> Option<u64> {
        if q <= v.len() {
            return Some(v[q - 1]);
        }
        let ratio = if v.len() >= 2 { v[v.len() - 1] / v[v.len() - 2] } else { 2 };
        let mut x = v[v.len() - 1];
        for _ in v.len()..q {
            x = x.checked_mul(ratio)?;
        }
        Some(x)
    }

    /// Amplitude at stage q.
    pub fn delta(&self, q: usize) -> f64 {
        match self.spec.variant {
            SchemeVariant::NewtonNash => {
                self.lambda(2).powf(3.0 * self.spec.beta)
                    * self.lambda(q).powf(-2.0 * self.spec.beta)
            }
            SchemeVariant::Separation => self.lambda(q).powf(-2.0 * self.spec.beta),
        }
    }

    /// Gluing/window time scale at stage q.
    pub fn tau(&self, q: usize) -> f64 {
        match self.spec.variant {
            SchemeVariant::NewtonNash => {
                self.delta(q).powf(-0.5) * self.lambda(q).powf(-1.0 - 5.0 * self.spec.alpha)
            }
            SchemeVariant::Separation => {
                1.0 / (self.lambda(q).sqrt()
                    * self.lambda(q + 1).sqrt()
                    * self.delta(q).powf(0.25)
                    * self.delta(q + 1).powf(0.25))
            }
        }
    }

    /// Oscillator playback rate entering stage q (Newton-Nash, q >= 2).
    pub fn mu(&self, q: usize) -> Result<f64, GeometryError> {
        if self.spec.variant != SchemeVariant::NewtonNash {
            return Err(GeometryError::TimeLayout {
                detail: "playback rate is defined only for the Newton-Nash variant".to_string(),
            });
        }
        if q < 2 {
            return Err(GeometryError::TimeLayout {
                detail: "playback rate indexes the incoming stage; q must be >= 2".to_string(),
            });
        }
        Ok(self.lambda(q).powf(1.0 / 3.0)
            * self.lambda(q - 1).powf(2.0 / 3.0 + 5.0 * self.spec.alpha)
            * self.delta(q).sqrt())
    }

    /// Mollification length at stage q.
    pub fn ell(&self, q: usize) -> f64 {
        match self.spec.variant {
            SchemeVariant::NewtonNash => match &self.spec.ladder {
                Ladder::Explicit(_) => 1.0 / (2.0 * self.lambda(q)),
                Ladder::Generated { b, .. } => {
                    let x = newton_nash_gain_exponent(self.spec.beta, *b);
                    self.lambda(q).powf(-1.0 + x / 10.0)
                }
            },
            SchemeVariant::Separation => {
                self.lambda(q).powf(-0.75 - 8.0 * self.spec.alpha)
                    * self.lambda(q + 1).powf(-0.25)
                    * (self.delta(q + 1) / self.delta(q)).powf(3.0 / 8.0)
            }
        }
    }

    /// Per-level amplitude entering stage q (Newton-Nash): level 0 is the
    /// stage amplitude, each level divides by the corrective gain.
    pub fn delta_level(&self, q: usize, level: u32) -> Result<f64, GeometryError> {
        if self.spec.variant != SchemeVariant::NewtonNash {
            return Err(GeometryError::TimeLayout {
                detail: "per-level amplitudes exist only for the Newton-Nash variant".to_string(),
            });
        }
        if level > self.spec.levels {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "level {level} exceeds the configured {} levels",
                    self.spec.levels
                ),
            });
        }
        let gain = self.tau(q - 1)
            * self.mu(q)?
            * self.ell(q - 1).powf(10.0 * self.spec.alpha);
        Ok(gain.powi(-(level as i32)) * self.delta(q))
    }

    /// Freeze layout: number of perturbation windows at stage q.
    pub fn freeze_window_count(&self, q: usize) -> Result<usize, GeometryError> {
        let tau = self.tau(q);
        let quiet = self.spec.quiet_band;
        if !(tau < quiet / 2.0) {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "window scale {tau} too coarse for the quiet band {quiet}: need tau < quiet/2"
                ),
            });
        }
        // Unique multiple of tau in the half-open length-tau interval
        // (quiet - 2 tau, quiet - tau].
        let i = ((quiet - tau) / tau + 1e-12).floor() as usize;
        Ok(i + 1)
    }

    /// Freeze layout: anchors of the perturbation windows at stage q.
    ///
    /// Windows live in the middle band of the horizon; each anchor `t_i`
    /// opens the window `[t_i, t_i + tau]`.
    pub fn freeze_anchors(&self, q: usize) -> Result<Vec<f64>, GeometryError> {
        let count = self.freeze_window_count(q)?;
        let tau = self.tau(q);
        let start = 2.0 * self.spec.quiet_band;
        let last_end = start + count as f64 * tau;
        if last_end > self.spec.horizon - self.spec.quiet_band + 1e-12 {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "freeze windows end at {last_end}, past the protected tail {}",
                    self.spec.horizon - self.spec.quiet_band
                ),
            });
        }
        Ok((0..count).map(|i| start + i as f64 * tau).collect())
    }

    /// Energy layout: number of gluing transitions at stage q.
    pub fn energy_transition_count(&self, q: usize) -> Result<usize, GeometryError> {
        let tau = self.tau(q);
        let t_end = self.spec.horizon;
        let mut m = 0usize;
        let mut i = 1usize;
        while (i as f64 - 1.0) * tau + 2.0 * tau / 3.0 < t_end {
            m = i;
            i += 1;
            if i > 1_000_000 {
                return Err(GeometryError::TimeLayout {
                    detail: "window scale vanishes against the horizon".to_string(),
                });
            }
        }
        if m < 2 {
            return Err(GeometryError::TimeLayout {
                detail: format!("horizon {t_end} holds fewer than two windows of scale {tau}"),
            });
        }
        Ok(m)
    }

    /// Energy layout: anchors `i * tau` of transitions and windows.
    pub fn energy_anchors(&self, q: usize) -> Result<Vec<f64>, GeometryError> {
        let m = self.energy_transition_count(q)?;
        let tau = self.tau(q);
        let last_wave_end = (m as f64 - 1.0) * tau + 5.0 * tau / 6.0;
        if last_wave_end > self.spec.horizon + 1e-12 {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "last window's waves end at {last_wave_end}, past the horizon {}",
                    self.spec.horizon
                ),
            });
        }
        Ok((0..m).map(|i| i as f64 * tau).collect())
    }

    /// Layout-appropriate window anchors at stage q.
    pub fn anchors(&self, q: usize) -> Result<Vec<f64>, GeometryError> {
        match self.spec.variant {
            SchemeVariant::NewtonNash => match self.spec.layout {
                RunLayout::Freeze => self.freeze_anchors(q),
                RunLayout::Energy => self.energy_anchors(q),
            },
            SchemeVariant::Separation => {
                let count = self.window_count(q)?;
                let tau = self.tau(q);
                Ok((0..count).map(|i| i as f64 * tau).collect())
            }
        }
    }

    /// Separation variant: number of flow windows covering the horizon.
    pub fn window_count(&self, q: usize) -> Result<usize, GeometryError> {
        if self.spec.variant != SchemeVariant::Separation {
            return Err(GeometryError::TimeLayout {
                detail: "flow windows belong to the separation variant".to_string(),
            });
        }
        let tau = self.tau(q);
        let count = (self.spec.horizon / tau - 1e-9).ceil() as usize;
        if count == 0 {
            return Err(GeometryError::TimeLayout {
                detail: "horizon shorter than one flow window".to_string(),
            });
        }
        Ok(count)
    }

    /// Separation variant: spatial plateau geometry at stage q.
    pub fn separation_geometry(&self, q: usize) -> Result<SeparationGeometry, GeometryError> {
        if self.spec.variant != SchemeVariant::Separation {
            return Err(GeometryError::TimeLayout {
                detail: "spatial separation geometry belongs to the separation variant"
                    .to_string(),
            });
        }
        let (epsilon0, unit) = match self.spec.geometry {
            GeometryMode::DeskUnits { epsilon0, u_base } => {
                (epsilon0, u_base * 0.5f64.powi(q as i32))
            }
            GeometryMode::Formula => {
                let epsilon0 = self.lambda(1).powf(-1.0 / 20.0);
                (epsilon0, self.lambda(q).powf(-1.0 / 30.0) / 50.0)
            }
        };
        let plateau_half = 0.75 * epsilon0;
        let inner_half = plateau_half + 6.0 * unit;
        let outer_half = plateau_half + 8.0 * unit;
        if !(outer_half < 0.5) {
            return Err(GeometryError::OverlappingWindows {
                detail: format!(
                    "separation plateau outer half-width {outer_half} does not fit in the cell"
                ),
            });
        }
        Ok(SeparationGeometry { epsilon0, unit, plateau_half, inner_half, outer_half })
    }

    /// Minimal admissible ladder seed (log): generated ladders must start
    /// above this to honor the amplitude, radius, and quiet-band bounds.
    pub fn minimum_seed_log(&self, amplitude_budget: f64, r0: f64) -> f64 {
        let spec = &self.spec;
        let by_amplitude = (100.0 / spec.alpha) * amplitude_budget.max(1.0).ln();
        let by_floor = (spec.beta / spec.alpha) * 50f64.ln();
        let by_radius = (2.0 / spec.alpha) * (2.0 / r0).ln();
        let by_quiet = (3.0 / spec.quiet_band).max(1.0).ln();
        by_amplitude.max(by_floor).max(by_radius).max(by_quiet)
    }
}
