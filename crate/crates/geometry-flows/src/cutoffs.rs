//! Temporal and spatial cutoff families.
//!
//! Everything here is built from the exact-saturation primitives in
//! [`crate::step`], so products that must vanish (a ramp against a plateau,
//! two tiles in disjoint bands, a pattern against a wave parked in a
//! different phase slot) vanish *exactly* in floating point: at every point
//! at least one factor is the literal `0.0` or the other is the literal
//! `1.0`.
//!
//! Families:
//! - [`GluingPartition`]: a partition of unity in time whose members hand
//!   off inside short ramps, one per window anchor.
//! - [`NewtonCutoffs`]: a nested ladder of plateau cutoffs per window, used
//!   to stack corrective levels so that cross terms cancel exactly.
//! - [`EnergyTiles`]: time-staggered spatial band profiles whose squared
//!   masses stay inside a fixed corridor and whose supports never meet.
//! - [`SquareBump`]: a lattice-exact patterned bump with zero grid mean,
//!   unit grid norm, and a phase-window certificate for parking shear waves
//!   away from its support.
//! - [`WindowPartition`]: a squared partition of unity in time (sin/cos
//!   handoffs) for the separation variant.
//! - [`SpatialCutoff`]: one minus a plateau bump on a centered square, for
//!   carving a quiet hole out of the cell.

use crate::error::GeometryError;
use crate::schedule::{ParameterSchedule, RunLayout, SchemeVariant};
use crate::step::{bump01, integral_01, smooth_step, smooth_step_deriv, window, window_deriv};
use spectral_core::{Grid, ScalarField};
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

/// Denominator for the dyadic side/center coordinates of [`SquareBump`].
pub const PATTERN_DENOM: u32 = 1024;
/// Desk-scale pattern side, in units of `1/PATTERN_DENOM`.
pub const PATTERN_SIDE_NUM: u32 = 102;
/// Desk-scale pattern center, in units of `1/PATTERN_DENOM`.
pub const PATTERN_CENTER_NUM: (u32, u32) = (512, 512);

fn check_uniform_spacing(anchors: &[f64], tau: f64) -> Result<(), GeometryError> {
    if anchors.is_empty() {
        return Err(GeometryError::TimeLayout {
            detail: "cutoff family needs at least one window anchor".to_string(),
        });
    }
    if !(tau > 0.0) {
        return Err(GeometryError::TimeLayout {
            detail: format!("window scale {tau} must be positive"),
        });
    }
    for i in 1..anchors.len() {
        let gap = anchors[i] - anchors[i - 1];
        if (gap - tau).abs() > 1e-9 * tau {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "anchors must be uniformly spaced by {tau}; gap {gap} at index {i}"
                ),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gluing partition
// ---------------------------------------------------------------------------

/// Partition of unity in time subordinate to the window anchors.
///
/// With anchors `t_0 < .. < t_{m-1}` spaced by `tau`, each anchor hosts one
/// handoff ramp on `[t_j + tau/3, t_j + 2 tau/3]`.  The `m + 1` members
/// telescope through the ramps, so their sum is exactly one at every time
/// and member `i` has a plateau covering the gap between consecutive ramps.
#[derive(Clone, Debug)]
pub struct GluingPartition {
    anchors: Vec<f64>,
    tau: f64,
}

impl GluingPartition {
    pub fn new(anchors: Vec<f64>, tau: f64) -> Result<Self, GeometryError> {
        check_uniform_spacing(&anchors, tau)?;
        Ok(GluingPartition { anchors, tau })
    }

    /// Ramp `j` (0-based), rising 0 -> 1 across its transition interval.
    fn ramp(&self, j: usize, t: f64) -> f64 {
        let lo = self.anchors[j] + self.tau / 3.0;
        smooth_step((t - lo) / (self.tau / 3.0))
    }

    fn ramp_deriv(&self, j: usize, t: f64) -> f64 {
        let lo = self.anchors[j] + self.tau / 3.0;
        smooth_step_deriv((t - lo) / (self.tau / 3.0)) * 3.0 / self.tau
    }

    /// Number of partition members (`anchors + 1`).
    pub fn member_count(&self) -> usize {
        self.anchors.len() + 1
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Value of member `i` at time `t`.
    pub fn eval(&self, i: usize, t: f64) -> f64 {
        let m = self.anchors.len();
        assert!(i <= m, "member index out of range");
        if i == 0 {
            1.0 - self.ramp(0, t)
        } else if i == m {
            self.ramp(m - 1, t)
        } else {
            self.ramp(i - 1, t) - self.ramp(i, t)
        }
    }

    /// Time derivative of member `i` at time `t`.
    pub fn eval_deriv(&self, i: usize, t: f64) -> f64 {
        let m = self.anchors.len();
        assert!(i <= m, "member index out of range");
        if i == 0 {
            -self.ramp_deriv(0, t)
        } else if i == m {
            self.ramp_deriv(m - 1, t)
        } else {
            self.ramp_deriv(i - 1, t) - self.ramp_deriv(i, t)
        }
    }

    /// Interval on which ramp `j` moves (members `j` and `j+1` hand off).
    pub fn transition_interval(&self, j: usize) -> (f64, f64) {
        (
            self.anchors[j] + self.tau / 3.0,
            self.anchors[j] + 2.0 * self.tau / 3.0,
        )
    }

    /// Interval on which member `i` is exactly one.
    pub fn plateau(&self, i: usize) -> (f64, f64) {
        let m = self.anchors.len();
        assert!(i <= m, "member index out of range");
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.anchors[i - 1] + 2.0 * self.tau / 3.0
        };
        let hi = if i == m {
            f64::INFINITY
        } else {
            self.anchors[i] + self.tau / 3.0
        };
        (lo, hi)
    }
}

// ---------------------------------------------------------------------------
// Nested corrective cutoffs
// ---------------------------------------------------------------------------

/// Nested ladder of plateau cutoffs attached to each window.
///
/// Each window `[t_i, t_i + tau]` carries two interleaved ladders indexed
/// by level `n = 0..=levels`, built from the bases `t_i + tau/3` and
/// `t_i + 2 tau/3` with edges offset outward in units of
/// `u = tau / (24 levels)`:
///
/// - outer cutoffs `chi(i, n)`: support edge at `(4n+2)u`, plateau edge at
///   `(4n+1)u`;
/// - inner cutoffs `chi_bar(i, n)`: support edge at `4n u`, plateau edge at
///   `(4n-1)u` (level 0 turns inward, so its plateau sits one unit inside
///   the bases).
///
/// The interleaving makes the algebra of the corrective stack exact on the
/// nose: `chi * chi_bar = chi_bar`, `chi * chi_bar(next) = chi`, and every
/// ramp of one ladder meets a flat stretch of the other, so products of a
/// derivative with the companion cutoff are exactly zero.
#[derive(Clone, Debug)]
pub struct NewtonCutoffs {
    anchors: Vec<f64>,
    tau: f64,
    levels: u32,
}

impl NewtonCutoffs {
    pub fn new(anchors: Vec<f64>, tau: f64, levels: u32) -> Result<Self, GeometryError> {
        check_uniform_spacing(&anchors, tau)?;
        if levels == 0 {
            return Err(GeometryError::TimeLayout {
                detail: "corrective cutoff ladder needs at least one level".to_string(),
            });
        }
        Ok(NewtonCutoffs { anchors, tau, levels })
    }

    /// Edge offset unit.
    pub fn unit(&self) -> f64 {
        self.tau / (24.0 * self.levels as f64)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn window_count(&self) -> usize {
        self.anchors.len()
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn bases(&self, i: usize) -> (f64, f64) {
        let t = self.anchors[i];
        (t + self.tau / 3.0, t + 2.0 * self.tau / 3.0)
    }

    fn outer_edges(&self, i: usize, n: u32) -> (f64, f64, f64, f64) {
        assert!(n <= self.levels, "level out of range");
        let (lo, hi) = self.bases(i);
        let u = self.unit();
        let spt = (4 * n + 2) as f64 * u;
        let top = (4 * n + 1) as f64 * u;
        (lo - spt, lo - top, hi + top, hi + spt)
    }

    fn inner_edges(&self, i: usize, n: u32) -> (f64, f64, f64, f64) {
        assert!(n <= self.levels, "level out of range");
        let (lo, hi) = self.bases(i);
        let u = self.unit();
        let spt = (4 * n) as f64 * u;
        let top = (4 * n) as f64 * u - u;
        (lo - spt, lo - top, hi + top, hi + spt)
    }

    /// Outer cutoff at window `i`, level `n`.
    pub fn chi(&self, i: usize, n: u32, t: f64) -> f64 {
        let (a, b, c, d) = self.outer_edges(i, n);
        window(t, a, b, c, d)
    }

    /// Time derivative of the outer cutoff.
    pub fn chi_deriv(&self, i: usize, n: u32, t: f64) -> f64 {
        let (a, b, c, d) = self.outer_edges(i, n);
        window_deriv(t, a, b, c, d)
    }

    /// Inner cutoff at window `i`, level `n`.
    pub fn chi_bar(&self, i: usize, n: u32, t: f64) -> f64 {
        let (a, b, c, d) = self.inner_edges(i, n);
        window(t, a, b, c, d)
    }

    /// Time derivative of the inner cutoff.
    pub fn chi_bar_deriv(&self, i: usize, n: u32, t: f64) -> f64 {
        let (a, b, c, d) = self.inner_edges(i, n);
        window_deriv(t, a, b, c, d)
    }

    /// Support of the outer cutoff at window `i`, level `n`.
    pub fn chi_support(&self, i: usize, n: u32) -> (f64, f64) {
        let (a, _, _, d) = self.outer_edges(i, n);
        (a, d)
    }

    /// Support of the inner cutoff at window `i`, level `n`.
    pub fn chi_bar_support(&self, i: usize, n: u32) -> (f64, f64) {
        let (a, _, _, d) = self.inner_edges(i, n);
        (a, d)
    }

    /// Widest interval the window's perturbations can occupy: the support
    /// of the top inner cutoff, exactly `[t_i + tau/6, t_i + 5 tau/6]`.
    pub fn envelope(&self, i: usize) -> (f64, f64) {
        self.chi_bar_support(i, self.levels)
    }
}

// ---------------------------------------------------------------------------
// Energy tiles
// ---------------------------------------------------------------------------

/// Horizontal band profiles used by the tiles, keyed by tile parity.
/// Even tiles occupy the upper half of the cell, odd tiles the lower half;
/// the closed supports are disjoint, so coexisting tiles of opposite
/// parity have exactly vanishing products.
const UPPER_BAND: (f64, f64, f64, f64) = (0.50, 0.55, 0.90, 0.95);
const LOWER_BAND: (f64, f64, f64, f64) = (0.00, 0.05, 0.40, 0.45);

fn band_integrals() -> (f64, f64) {
    static CACHE: OnceLock<(f64, f64)> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let (a, b, c, d) = UPPER_BAND;
        let v1 = integral_01(|x| window(x, a, b, c, d), 1 << 12);
        let v2 = integral_01(|x| window(x, a, b, c, d).powi(2), 1 << 12);
        (v1, v2)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum TilePhase {
    Zero,
    /// Scaled band profile `s * V`.
    Band(f64),
    /// Blend toward full coverage: `1 - mu * (1 - V)`.
    Blend(f64),
    Full,
}

/// Time-staggered spatial envelopes steering where the energy corrector
/// acts.
///
/// Tile `j` is attached to window `j`.  It is born during the handoff out
/// of window `j-1`, holds its parity band while sharing the cell with a
/// neighbor, expands to cover the whole cell before its own window's waves
/// start, retreats back to the band during the next handoff, and dies
/// before the tile after next is born.  Consequences, by construction:
///
/// - at every time, at most two tiles are nonzero, and when two coexist
///   they sit in disjoint horizontal bands (product exactly zero);
/// - the total squared mass stays inside a fixed corridor (roughly
///   `[0.39, 1]`), never degenerating or exceeding the cell.
///
/// Tile 0 starts at full coverage; the last tile ends at full coverage.
#[derive(Clone, Debug)]
pub struct EnergyTiles {
    anchors: Vec<f64>,
    tau: f64,
    horizon: f64,
}

impl EnergyTiles {
    pub fn new(anchors: Vec<f64>, tau: f64, horizon: f64) -> Result<Self, GeometryError> {
        check_uniform_spacing(&anchors, tau)?;
        if anchors.len() < 2 {
            return Err(GeometryError::TimeLayout {
                detail: "energy tiles need at least two windows".to_string(),
            });
        }
        let last = anchors[anchors.len() - 1];
        if horizon < last + tau / 6.0 - 1e-12 {
            return Err(GeometryError::TimeLayout {
                detail: format!(
                    "horizon {horizon} ends before the last handoff completes at {}",
                    last + tau / 6.0
                ),
            });
        }
        Ok(EnergyTiles { anchors, tau, horizon })
    }

    pub fn tile_count(&self) -> usize {
        self.anchors.len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Handoff interval from window `j-1` to window `j` (tile `j` is born
    /// here, tile `j-1` dies here); `j` in `1..tile_count`.
    pub fn handoff(&self, j: usize) -> (f64, f64) {
        assert!(j >= 1 && j < self.anchors.len(), "handoff index out of range");
        let start = self.anchors[j - 1] + 2.0 * self.tau / 3.0;
        (start, start + self.tau / 2.0)
    }

    /// Band profile of tile `j` (parity decides the half of the cell).
    pub fn band_value(&self, j: usize, x2: f64) -> f64 {
        let (a, b, c, d) = if j % 2 == 0 { UPPER_BAND } else { LOWER_BAND };
        window(x2, a, b, c, d)
    }

    /// Closed vertical support of tile `j`'s band.
    pub fn band_support(&self, j: usize) -> (f64, f64) {
        let (a, _, _, d) = if j % 2 == 0 { UPPER_BAND } else { LOWER_BAND };
        (a, d)
    }

    fn phase(&self, j: usize, t: f64) -> TilePhase {
        let m = self.anchors.len();
        assert!(j < m, "tile index out of range");
        let half = self.tau / 2.0;
        if j > 0 {
            let sb = (t - (self.anchors[j - 1] + 2.0 * self.tau / 3.0)) / half;
            if sb < 0.40 {
                return TilePhase::Zero;
            }
            if sb < 0.55 {
                return TilePhase::Band(smooth_step((sb - 0.40) / 0.15));
            }
            if sb < 0.82 {
                return TilePhase::Band(1.0);
            }
            if sb < 0.98 {
                return TilePhase::Blend(1.0 - smooth_step((sb - 0.82) / 0.16));
            }
        }
        if j + 1 < m {
            let sd = (t - (self.anchors[j] + 2.0 * self.tau / 3.0)) / half;
            if sd < 0.02 {
                return TilePhase::Full;
            }
            if sd < 0.20 {
                return TilePhase::Blend(smooth_step((sd - 0.02) / 0.18));
            }
            if sd < 0.60 {
                return TilePhase::Band(1.0);
            }
            if sd < 0.78 {
                return TilePhase::Band(1.0 - smooth_step((sd - 0.60) / 0.18));
            }
            return TilePhase::Zero;
        }
        TilePhase::Full
    }

    /// Value of tile `j` at time `t`, height `x2`.
    pub fn eval(&self, j: usize, t: f64, x2: f64) -> f64 {
        match self.phase(j, t) {
            TilePhase::Zero => 0.0,
            TilePhase::Band(s) => s * self.band_value(j, x2),
            TilePhase::Blend(mu) => 1.0 - mu * (1.0 - self.band_value(j, x2)),
            TilePhase::Full => 1.0,
        }
    }

    /// Integral of the squared tile over the height coordinate, from the
    /// cached band moments (no quadrature at call time).
    pub fn squared_mass(&self, j: usize, t: f64) -> f64 {
        let (v1, v2) = band_integrals();
        match self.phase(j, t) {
            TilePhase::Zero => 0.0,
            TilePhase::Band(s) => s * s * v2,
            TilePhase::Blend(mu) => {
                (1.0 - mu) * (1.0 - mu) + 2.0 * (1.0 - mu) * mu * v1 + mu * mu * v2
            }
            TilePhase::Full => 1.0,
        }
    }

    /// Sum of squared masses over all tiles at time `t`.
    pub fn total_squared_mass(&self, t: f64) -> f64 {
        (0..self.anchors.len()).map(|j| self.squared_mass(j, t)).sum()
    }
}

// ---------------------------------------------------------------------------
// Patterned square bump
// ---------------------------------------------------------------------------

/// Lattice-exact patterned bump with zero grid mean and unit grid norm.
///
/// On an `n x n` grid the pattern assigns grid point `(i1, i2)` the value
/// `B(m1) * (P(m2 + lam) - P(m2))`, where `m_j = lam * (i_j - base_j) mod n`
/// and `B = P` sample a smooth bump supported on a `side`-sized fraction of
/// the cell.  The construction repeats with spatial period `1/lam`, its
/// grid mean telescopes to zero exactly, and its support in the second
/// coordinate occupies the pattern rows plus one extra lattice row.
///
/// The phase-window certificate ([`SquareBump::frac_window`]) bounds which
/// fractional phases of a direction `k` the support can touch, and
/// [`SquareBump::admissible_offset`] parks a compactly supported shear wave
/// in a phase slot at positive circular distance from that window, making
/// the pointwise product of the two fields exactly zero.
#[derive(Clone, Debug)]
pub struct SquareBump {
    grid: Grid,
    lambda: u64,
    side_num: u32,
    center_num: (u32, u32),
    base: (i64, i64),
    field: ScalarField,
}

pub fn square_bump(
    grid: Grid,
    lambda: u64,
    side_num: u32,
    center_num: (u32, u32),
) -> Result<SquareBump, GeometryError> {
    let n = grid.n() as u64;
    if lambda == 0 {
        return Err(GeometryError::UnresolvableSupport { points: 0.0, needed: 2.0 });
    }
    if !(side_num > 0 && side_num < PATTERN_DENOM) {
        return Err(GeometryError::OverlappingWindows {
            detail: format!(
                "pattern side {side_num}/{PATTERN_DENOM} must lie strictly inside the cell"
            ),
        });
    }
    // The pattern is anchored to a grid point: the center coordinates must
    // land exactly on the lattice.
    let mut base = [0i64; 2];
    for (j, &c) in [center_num.0, center_num.1].iter().enumerate() {
        let scaled = n * c as u64;
        if scaled % PATTERN_DENOM as u64 != 0 {
            return Err(GeometryError::OverlappingWindows {
                detail: format!(
                    "pattern center {c}/{PATTERN_DENOM} does not land on the {n}-point lattice"
                ),
            });
        }
        base[j] = (scaled / PATTERN_DENOM as u64) as i64;
    }
    // Interior resolution: each pattern copy must hold at least two interior
    // lattice points per axis.
    let side = side_num as f64 / PATTERN_DENOM as f64;
    let points = side * n as f64 / lambda as f64;
    if points < 2.0 {
        return Err(GeometryError::UnresolvableSupport { points, needed: 2.0 });
    }

    let n_i = n as i64;
    let lam_mod = (lambda % n) as i64;
    // Pattern table sampled on the lattice: P[m] = bump01((m/n) / side).
    let table: Vec<f64> = (0..n_i)
        .map(|m| bump01((m as f64 / n as f64) / side))
        .collect();
    let lam_i = lambda as i64;
    let mut values = Vec::with_capacity((n * n) as usize);
    for i1 in 0..n_i {
        let m1 = (lam_i * (i1 - base[0])).rem_euclid(n_i) as usize;
        let b1 = table[m1];
        for i2 in 0..n_i {
            let m2 = (lam_i * (i2 - base[1])).rem_euclid(n_i) as usize;
            let shifted = (m2 + lam_mod as usize) % n as usize;
            values.push(b1 * (table[shifted] - table[m2]));
        }
    }
    let raw = ScalarField::from_values(grid, values)?;
    let norm = raw.l2_norm();
    if !(norm > 0.0) {
        return Err(GeometryError::UnresolvableSupport { points, needed: 2.0 });
    }
    let scaled: Vec<f64> = raw.values().iter().map(|v| v / norm).collect();
    let field = ScalarField::from_values(grid, scaled)?;
    Ok(SquareBump {
        grid,
        lambda,
        side_num,
        center_num,
        base: (base[0], base[1]),
        field,
    })
}

impl SquareBump {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// Pattern side as a fraction of the cell.
    pub fn side(&self) -> f64 {
        self.side_num as f64 / PATTERN_DENOM as f64
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.center_num.0 as f64 / PATTERN_DENOM as f64,
            self.center_num.1 as f64 / PATTERN_DENOM as f64,
        )
    }

    /// Interval of fractional phases `frac(lam * (k.1 x1 - k.0 x2))` that
    /// points of the support can reach.  Returned as `(lo, hi)` with
    /// `hi - lo` the window length; the window is meant modulo one and may
    /// wrap.
    pub fn frac_window(&self, k: (i64, i64)) -> (f64, f64) {
        let n = self.grid.n() as i64;
        let lam = self.lambda as i64;
        let shift_num = (lam * (k.1 * self.base.0 - k.0 * self.base.1)).rem_euclid(n);
        let shift = shift_num as f64 / n as f64;
        let kp = (k.1 as f64, -k.0 as f64);
        let side = self.side();
        let row = self.lambda as f64 / self.grid.n() as f64;
        let lo = f64::min(0.0, kp.0 * side) + f64::min(-kp.1 * row, kp.1 * side);
        let hi = f64::max(0.0, kp.0 * side) + f64::max(-kp.1 * row, kp.1 * side);
        (shift + lo, shift + hi)
    }

    /// Smallest circular distance between two arcs on the unit circle;
    /// zero if they intersect.
    fn circular_gap(a0: f64, la: f64, b0: f64, lb: f64) -> f64 {
        if la + lb >= 1.0 {
            return 0.0;
        }
        let a = a0.rem_euclid(1.0);
        let b = b0.rem_euclid(1.0);
        if (b - a).rem_euclid(1.0) < la || (a - b).rem_euclid(1.0) < lb {
            return 0.0;
        }
        let d1 = (b - (a + la)).rem_euclid(1.0);
        let d2 = (a - (b + lb)).rem_euclid(1.0);
        d1.min(d2)
    }

    /// Dyadic phase offset (numerator over [`PATTERN_DENOM`]) parking a
    /// wave of the given support width at maximal circular distance from
    /// the pattern's phase window in direction `k`.  Fails if no offset
    /// clears the window by more than one dyadic unit.
    pub fn admissible_offset(&self, k: (i64, i64), width_num: u32) -> Result<u32, GeometryError> {
        let width = width_num as f64 / PATTERN_DENOM as f64;
        let (lo, hi) = self.frac_window(k);
        let len_b = hi - lo;
        let mut best = (0u32, -1.0f64);
        for o in 0..PATTERN_DENOM {
            let gap = Self::circular_gap(o as f64 / PATTERN_DENOM as f64, width, lo, len_b);
            if gap > best.1 {
                best = (o, gap);
            }
        }
        if best.1 > 1.0 / PATTERN_DENOM as f64 {
            Ok(best.0)
        } else {
            Err(GeometryError::NoAdmissibleOffset { k })
        }
    }

    /// Largest pointwise product magnitude against another field on the
    /// same grid; exactly zero when the other field is parked in an
    /// admissible phase slot.
    pub fn nodal_defect(&self, other: &ScalarField) -> f64 {
        self.field
            .values()
            .iter()
            .zip(other.values().iter())
            .map(|(a, b)| (a * b).abs())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Squared window partition
// ---------------------------------------------------------------------------

/// Squared partition of unity in time for the separation variant.
///
/// Window `i` covers `[i tau, (i+1) tau]`; consecutive windows hand off on
/// the overlap `[i tau - tau/6, i tau]` through complementary sine/cosine
/// ramps, so the sum of *squares* is exactly one at every time.  The first
/// window starts saturated and the last stays saturated to the end.
#[derive(Clone, Debug)]
pub struct WindowPartition {
    count: usize,
    tau: f64,
}

impl WindowPartition {
    pub fn new(count: usize, tau: f64) -> Result<Self, GeometryError> {
        if count == 0 {
            return Err(GeometryError::TimeLayout {
                detail: "window partition needs at least one window".to_string(),
            });
        }
        if !(tau > 0.0) {
            return Err(GeometryError::TimeLayout {
                detail: format!("window scale {tau} must be positive"),
            });
        }
        Ok(WindowPartition { count, tau })
    }

    pub fn member_count(&self) -> usize {
        self.count
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Handoff interval into window `i` (`i` in `1..count`).
    pub fn overlap(&self, i: usize) -> (f64, f64) {
        assert!(i >= 1 && i < self.count, "overlap index out of range");
        (i as f64 * self.tau - self.tau / 6.0, i as f64 * self.tau)
    }

    pub fn eval(&self, i: usize, t: f64) -> f64 {
        assert!(i < self.count, "window index out of range");
        let w = self.tau / 6.0;
        let start = i as f64 * self.tau;
        let end = start + self.tau;
        if i > 0 {
            if t <= start - w {
                return 0.0;
            }
            if t < start {
                return (FRAC_PI_2 * smooth_step((t - (start - w)) / w)).sin();
            }
        }
        if i + 1 < self.count {
            if t >= end {
                return 0.0;
            }
            if t > end - w {
                return (FRAC_PI_2 * smooth_step((t - (end - w)) / w)).cos();
            }
        }
        1.0
    }

    pub fn eval_deriv(&self, i: usize, t: f64) -> f64 {
        assert!(i < self.count, "window index out of range");
        let w = self.tau / 6.0;
        let start = i as f64 * self.tau;
        let end = start + self.tau;
        if i > 0 && t > start - w && t < start {
            let s = (t - (start - w)) / w;
            return (FRAC_PI_2 * smooth_step(s)).cos() * FRAC_PI_2 * smooth_step_deriv(s) / w;
        }
        if i + 1 < self.count && t > end - w && t < end {
            let s = (t - (end - w)) / w;
            return -(FRAC_PI_2 * smooth_step(s)).sin() * FRAC_PI_2 * smooth_step_deriv(s) / w;
        }
        0.0
    }
}

// ---------------------------------------------------------------------------
// Spatial cutoff (quiet hole)
// ---------------------------------------------------------------------------

/// One minus a plateau bump on a centered square: exactly zero on the
/// central plateau, exactly one outside the outer square.
#[derive(Clone, Copy, Debug)]
pub struct SpatialCutoff {
    inner_half: f64,
    outer_half: f64,
}

impl SpatialCutoff {
    pub fn new(inner_half: f64, outer_half: f64) -> Result<Self, GeometryError> {
        if !(0.0 < inner_half && inner_half < outer_half && outer_half <= 0.5) {
            return Err(GeometryError::OverlappingWindows {
                detail: format!(
                    "cutoff half-widths must satisfy 0 < inner ({inner_half}) < outer \
                     ({outer_half}) <= 1/2"
                ),
            });
        }
        Ok(SpatialCutoff { inner_half, outer_half })
    }

    pub fn inner_half(&self) -> f64 {
        self.inner_half
    }

    pub fn outer_half(&self) -> f64 {
        self.outer_half
    }

    /// One-dimensional plateau profile centered at 1/2.
    pub fn profile(&self, s: f64) -> f64 {
        window(
            s,
            0.5 - self.outer_half,
            0.5 - self.inner_half,
            0.5 + self.inner_half,
            0.5 + self.outer_half,
        )
    }

    /// Cutoff value at a point of the unit cell.
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        1.0 - self.profile(x1) * self.profile(x2)
    }

    /// Sampled cutoff on a grid.
    pub fn field(&self, grid: Grid) -> Result<ScalarField, GeometryError> {
        Ok(ScalarField::from_fn(grid, |x1, x2| self.value(x1, x2)))
    }
}

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

/// Which cutoff family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffKind {
    /// Temporal partition of unity over the window anchors.
    Gluing,
    /// Outer corrective cutoff ladder.
    Newton,
    /// Inner corrective cutoff ladder (same object, narrower supports).
    NewtonBar,
    /// Quiet-hole spatial cutoff for the separation variant.
    Spatial,
    /// Energy corrector tiles.
    Tile,
    /// Patterned square bump on a grid.
    Square,
    /// Squared temporal partition for the separation variant.
    Window,
}

/// A built cutoff family.
#[derive(Clone, Debug)]
pub enum CutoffFamily {
    Gluing(GluingPartition),
    Newton(NewtonCutoffs),
    NewtonBar(NewtonCutoffs),
    Spatial(SpatialCutoff),
    Tile(EnergyTiles),
    Square(SquareBump),
    Window(WindowPartition),
}

impl CutoffFamily {
    pub fn kind(&self) -> CutoffKind {
        match self {
            CutoffFamily::Gluing(_) => CutoffKind::Gluing,
            CutoffFamily::Newton(_) => CutoffKind::Newton,
            CutoffFamily::NewtonBar(_) => CutoffKind::NewtonBar,
            CutoffFamily::Spatial(_) => CutoffKind::Spatial,
            CutoffFamily::Tile(_) => CutoffKind::Tile,
            CutoffFamily::Square(_) => CutoffKind::Square,
            CutoffFamily::Window(_) => CutoffKind::Window,
        }
    }
}

/// Build the requested cutoff family for stage `q` of a schedule.
///
/// `grid` is required only for the square bump (it is a grid field); all
/// other families are closed-form in time or space.
pub fn build_cutoffs(
    kind: CutoffKind,
    schedule: &ParameterSchedule,
    q: usize,
    grid: Option<Grid>,
) -> Result<CutoffFamily, GeometryError> {
    match kind {
        CutoffKind::Gluing => {
            let anchors = schedule.anchors(q)?;
            Ok(CutoffFamily::Gluing(GluingPartition::new(anchors, schedule.tau(q))?))
        }
        CutoffKind::Newton | CutoffKind::NewtonBar => {
            if schedule.variant() != SchemeVariant::NewtonNash {
                return Err(GeometryError::TimeLayout {
                    detail: "corrective cutoff ladders belong to the layered variant".to_string(),
                });
            }
            let anchors = schedule.anchors(q)?;
            let built = NewtonCutoffs::new(anchors, schedule.tau(q), schedule.levels())?;
            Ok(match kind {
                CutoffKind::Newton => CutoffFamily::Newton(built),
                _ => CutoffFamily::NewtonBar(built),
            })
        }
        CutoffKind::Spatial => {
            let g = schedule.separation_geometry(q)?;
            Ok(CutoffFamily::Spatial(SpatialCutoff::new(g.inner_half, g.outer_half)?))
        }
        CutoffKind::Tile => {
            if schedule.variant() != SchemeVariant::NewtonNash
                || schedule.layout() != RunLayout::Energy
            {
                return Err(GeometryError::TimeLayout {
                    detail: "energy tiles belong to the energy layout of the layered variant"
                        .to_string(),
                });
            }
            let anchors = schedule.energy_anchors(q)?;
            Ok(CutoffFamily::Tile(EnergyTiles::new(
                anchors,
                schedule.tau(q),
                schedule.horizon(),
            )?))
        }
        CutoffKind::Square => {
            let grid = grid.ok_or_else(|| GeometryError::TimeLayout {
                detail: "square bump construction requires a grid".to_string(),
            })?;
            let lambda = schedule.lambda_int(q)?;
            Ok(CutoffFamily::Square(square_bump(
                grid,
                lambda,
                PATTERN_SIDE_NUM,
                PATTERN_CENTER_NUM,
            )?))
        }
        CutoffKind::Window => {
            let count = schedule.window_count(q)?;
            Ok(CutoffFamily::Window(WindowPartition::new(count, schedule.tau(q))?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, ScheduleSpec};

    fn anchors(m: usize, tau: f64, start: f64) -> Vec<f64> {
        (0..m).map(|i| start + i as f64 * tau).collect()
    }

    #[test]
    fn gluing_partition_sums_to_one_and_telescopes() {
        let tau = 0.7;
        let p = GluingPartition::new(anchors(5, tau, 0.0), tau).unwrap();
        assert_eq!(p.member_count(), 6);
        for s in 0..400 {
            let t = -0.5 + s as f64 * 0.01;
            let total: f64 = (0..p.member_count()).map(|i| p.eval(i, t)).sum();
            assert!((total - 1.0).abs() < 1e-15, "t={t}: {total}");
            let dtotal: f64 = (0..p.member_count()).map(|i| p.eval_deriv(i, t)).sum();
            assert!(dtotal.abs() < 1e-12, "t={t}: {dtotal}");
        }
    }

    #[test]
    fn gluing_plateaus_are_exact() {
        let tau = 0.6;
        let p = GluingPartition::new(anchors(4, tau, 1.0), tau).unwrap();
        for i in 0..p.member_count() {
            let (lo, hi) = p.plateau(i);
            let probe_lo = if lo.is_finite() { lo } else { hi - 1.0 };
            let probe_hi = if hi.is_finite() { hi } else { lo + 1.0 };
            for s in 0..=10 {
                let t = probe_lo + (probe_hi - probe_lo) * s as f64 / 10.0;
                assert_eq!(p.eval(i, t), 1.0, "member {i} at t={t}");
            }
        }
        let (a, b) = p.transition_interval(1);
        assert!((a - (1.0 + tau + tau / 3.0)).abs() < 1e-15);
        assert!((b - (1.0 + tau + 2.0 * tau / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn corrective_ladder_identities_are_exact() {
        let tau = 0.9;
        let c = NewtonCutoffs::new(anchors(2, tau, 0.5), tau, 2).unwrap();
        let (lo, hi) = c.envelope(0);
        assert!((lo - (0.5 + tau / 6.0)).abs() < 1e-15);
        assert!((hi - (0.5 + 5.0 * tau / 6.0)).abs() < 1e-15);
        for s in 0..=4000 {
            let t = 0.3 + s as f64 * (tau * 1.2) / 4000.0;
            for n in 0..2u32 {
                let chi = c.chi(0, n, t);
                let bar = c.chi_bar(0, n, t);
                let bar_next = c.chi_bar(0, n + 1, t);
                // Plateau containments, exact in floating point.
                assert_eq!(chi * bar, bar, "chi absorbs its inner cutoff at t={t}");
                assert_eq!(chi * bar_next, chi, "next inner cutoff absorbs chi at t={t}");
                // Ramps meet flat stretches of the companion: exact zeros.
                assert_eq!(c.chi_deriv(0, n, t) * bar, 0.0, "t={t}");
                assert_eq!(chi * c.chi_bar_deriv(0, n + 1, t), 0.0, "t={t}");
            }
        }
    }

    #[test]
    fn corrective_supports_nest_inside_the_window() {
        let tau = 0.8;
        let c = NewtonCutoffs::new(anchors(3, tau, 0.0), tau, 2).unwrap();
        for n in 0..=2u32 {
            let (a, d) = c.chi_support(1, n);
            assert!(a > c.anchors()[1] && d < c.anchors()[1] + tau);
            if n > 0 {
                let (a_prev, d_prev) = c.chi_bar_support(1, n - 1);
                let (a_in, d_in) = c.chi_bar_support(1, n);
                assert!(a_in < a_prev && d_in > d_prev, "inner ladder grows with level");
            }
        }
    }

    #[test]
    fn energy_tiles_stay_in_the_mass_corridor() {
        let tau = 0.5;
        let tiles = EnergyTiles::new(anchors(5, tau, 0.0), tau, 3.0).unwrap();
        assert_eq!(tiles.eval(0, 0.0, 0.3), 1.0, "first tile starts saturated");
        assert_eq!(tiles.eval(4, 3.0, 0.7), 1.0, "last tile ends saturated");
        for s in 0..=600 {
            let t = 3.0 * s as f64 / 600.0;
            let total = tiles.total_squared_mass(t);
            assert!(total > 0.35 && total < 1.0 + 1e-12, "t={t}: {total}");
        }
    }

    #[test]
    fn coexisting_tiles_have_exactly_disjoint_supports() {
        let tau = 0.5;
        let tiles = EnergyTiles::new(anchors(5, tau, 0.0), tau, 3.0).unwrap();
        for s in 0..=300 {
            let t = 3.0 * s as f64 / 300.0;
            for j in 0..5 {
                for jp in (j + 1)..5 {
                    for g in 0..=200 {
                        let x2 = g as f64 / 200.0;
                        let prod = tiles.eval(j, t, x2) * tiles.eval(jp, t, x2);
                        assert_eq!(prod, 0.0, "tiles {j},{jp} overlap at t={t}, x2={x2}");
                    }
                }
            }
        }
    }

    #[test]
    fn tile_squared_mass_matches_quadrature() {
        let tau = 0.5;
        let tiles = EnergyTiles::new(anchors(4, tau, 0.0), tau, 2.5).unwrap();
        for &t in &[0.0, 0.45, 0.62, 0.75, 0.95, 1.3, 1.62] {
            for j in 0..4 {
                let direct = integral_01(|x| tiles.eval(j, t, x).powi(2), 1 << 10);
                let cached = tiles.squared_mass(j, t);
                assert!((direct - cached).abs() < 1e-8, "tile {j} at t={t}");
            }
        }
    }

    #[test]
    fn square_bump_is_normalized_mean_free_and_periodic() {
        let grid = Grid::new(128).unwrap();
        let h = square_bump(grid, 2, PATTERN_SIDE_NUM, PATTERN_CENTER_NUM).unwrap();
        let f = h.field();
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        assert!(f.mean().abs() < 1e-13);
        assert!(f.sup_norm() > 0.0);
        // Spatial period 1/lambda: shifting indices by n/lambda reproduces
        // the field exactly.
        let n = 128usize;
        let shift = n / 2;
        for i1 in 0..n {
            for i2 in 0..n {
                let a = f.at(i1, i2);
                let b = f.at((i1 + shift) % n, (i2 + shift) % n);
                assert_eq!(a, b, "period defect at ({i1},{i2})");
            }
        }
    }

    #[test]
    fn square_bump_phase_window_covers_the_support() {
        let grid = Grid::new(128).unwrap();
        let h = square_bump(grid, 2, PATTERN_SIDE_NUM, PATTERN_CENTER_NUM).unwrap();
        for &k in &[(1i64, 0i64), (0, 1), (1, 1), (1, -1), (2, 1)] {
            let (lo, hi) = h.frac_window(k);
            let len = hi - lo;
            let n = 128i64;
            for i1 in 0..n {
                for i2 in 0..n {
                    if h.field().at(i1 as usize, i2 as usize) != 0.0 {
                        let phase = ((2 * (k.1 * i1 - k.0 * i2)).rem_euclid(n)) as f64 / n as f64;
                        let inside = (phase - lo).rem_euclid(1.0) <= len + 1e-12
                            || (phase - lo).rem_euclid(1.0) >= 1.0 - 1e-12;
                        assert!(inside, "phase {phase} outside window ({lo},{hi}) for k={k:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn admissible_offsets_exist_for_small_directions() {
        let grid = Grid::new(128).unwrap();
        let h = square_bump(grid, 2, PATTERN_SIDE_NUM, PATTERN_CENTER_NUM).unwrap();
        for &k in &[(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
            let o = h.admissible_offset(k, 102).unwrap();
            assert!(o < PATTERN_DENOM);
        }
    }

    #[test]
    fn square_bump_rejects_bad_geometry() {
        let grid = Grid::new(128).unwrap();
        // Center not on the lattice: 1/1024 of the cell needs n >= 1024.
        assert!(matches!(
            square_bump(grid, 2, PATTERN_SIDE_NUM, (511, 512)),
            Err(GeometryError::OverlappingWindows { .. })
        ));
        // Too coarse: side*n/lambda = 12.75/32 < 2.
        assert!(matches!(
            square_bump(grid, 32, PATTERN_SIDE_NUM, PATTERN_CENTER_NUM),
            Err(GeometryError::UnresolvableSupport { .. })
        ));
    }

    #[test]
    fn window_partition_squares_sum_to_one() {
        let tau = 0.21;
        let w = WindowPartition::new(5, tau).unwrap();
        assert_eq!(w.eval(0, 0.0), 1.0);
        assert_eq!(w.eval(4, 5.0 * tau), 1.0, "last window stays saturated");
        for s in 0..=800 {
            let t = s as f64 * (5.0 * tau) / 800.0;
            let total: f64 = (0..5).map(|i| w.eval(i, t).powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-14, "t={t}: {total}");
        }
        let (a, b) = w.overlap(2);
        assert!((a - (2.0 * tau - tau / 6.0)).abs() < 1e-15);
        assert!((b - 2.0 * tau).abs() < 1e-15);
    }

    #[test]
    fn window_partition_derivative_matches_finite_differences() {
        let tau = 0.4;
        let w = WindowPartition::new(3, tau).unwrap();
        let h = 1e-6;
        for s in 0..=300 {
            let t = 0.05 + s as f64 * (3.0 * tau - 0.1) / 300.0;
            for i in 0..3 {
                let fd = (w.eval(i, t + h) - w.eval(i, t - h)) / (2.0 * h);
                assert!((fd - w.eval_deriv(i, t)).abs() < 1e-5, "window {i} at t={t}");
            }
        }
    }

    #[test]
    fn spatial_cutoff_has_exact_hole_and_far_field() {
        let c = SpatialCutoff::new(0.2235, 0.2355).unwrap();
        assert_eq!(c.value(0.5, 0.5), 0.0);
        assert_eq!(c.value(0.4, 0.6), 0.0, "inside the inner square");
        assert_eq!(c.value(0.1, 0.5), 1.0, "outside the outer square");
        assert_eq!(c.value(0.02, 0.98), 1.0);
        assert!(SpatialCutoff::new(0.3, 0.2).is_err());
        assert!(SpatialCutoff::new(0.3, 0.6).is_err());
    }

    #[test]
    fn dispatcher_builds_every_family_for_its_variant() {
        let energy = build_schedule(ScheduleSpec::desk_newton_nash(RunLayout::Energy)).unwrap();
        let sep = build_schedule(ScheduleSpec::desk_separation()).unwrap();
        let grid = Grid::new(128).unwrap();

        let g = build_cutoffs(CutoffKind::Gluing, &energy, 1, None).unwrap();
        assert_eq!(g.kind(), CutoffKind::Gluing);
        let c = build_cutoffs(CutoffKind::Newton, &energy, 1, None).unwrap();
        assert_eq!(c.kind(), CutoffKind::Newton);
        let cb = build_cutoffs(CutoffKind::NewtonBar, &energy, 1, None).unwrap();
        assert_eq!(cb.kind(), CutoffKind::NewtonBar);
        let t = build_cutoffs(CutoffKind::Tile, &energy, 1, None).unwrap();
        assert_eq!(t.kind(), CutoffKind::Tile);
        let s = build_cutoffs(CutoffKind::Square, &energy, 2, Some(grid)).unwrap();
        assert_eq!(s.kind(), CutoffKind::Square);

        let sp = build_cutoffs(CutoffKind::Spatial, &sep, 1, None).unwrap();
        assert_eq!(sp.kind(), CutoffKind::Spatial);
        let w = build_cutoffs(CutoffKind::Window, &sep, 1, None).unwrap();
        assert_eq!(w.kind(), CutoffKind::Window);

        // Wrong-variant requests are rejected.
        assert!(build_cutoffs(CutoffKind::Tile, &sep, 1, None).is_err());
        assert!(build_cutoffs(CutoffKind::Window, &energy, 1, None).is_err());
        assert!(build_cutoffs(CutoffKind::Square, &energy, 2, None).is_err());
    }
}
