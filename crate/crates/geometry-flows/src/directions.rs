//! Integer lattice direction families and the smooth amplitude functions
//! that decompose symmetric 2x2 matrices near the identity into rank-one
//! contributions along those directions.
//!
//! Two disjoint eight-vector velocity families and a two-vector axis pair
//! for the transported scalar are provided.  For each signed direction `k`
//! the squared amplitude is a linear functional `R -> tr(C_k R)` chosen so
//! that summing `a_k^2(R) khat (x) khat` over a family reproduces `R`
//! exactly whenever `R` stays within operator distance [`DirectionSet::r0`]
//! of the identity.  The same coefficient table, re-indexed by an involution
//! of the pairs, performs the reconstruction in the perpendicular frame
//! (`kperp (x) kperp`).

use crate::error::GeometryError;
use spectral_core::{ScalarField, SymTensorField, VectorField};

/// Symmetric 2x2 matrix value; `xy` is the shared off-diagonal entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMatrix2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMatrix2 {
    pub const ZERO: Self = Self { xx: 0.0, xy: 0.0, yy: 0.0 };
    pub const IDENTITY: Self = Self { xx: 1.0, xy: 0.0, yy: 1.0 };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    /// Frobenius pairing tr(self * other) for symmetric matrices.
    pub fn pair(&self, other: &SymMatrix2) -> f64 {
        self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Both eigenvalues, smaller first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_gap = 0.5 * (self.xx - self.yy);
        let radius = (half_gap * half_gap + self.xy * self.xy).sqrt();
        (mean - radius, mean + radius)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs().max(hi.abs())
    }

    /// Nuclear norm: sum of absolute eigenvalues.
    pub fn nuclear_norm(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs() + hi.abs()
    }

    /// Operator distance from the identity matrix.
    pub fn distance_from_identity(&self) -> f64 {
        SymMatrix2::new(self.xx - 1.0, self.xy, self.yy - 1.0).op_norm()
    }

    /// Rank-one matrix v (x) v.
    pub fn outer(v: [f64; 2]) -> Self {
        Self { xx: v[0] * v[0], xy: v[0] * v[1], yy: v[1] * v[1] }
    }

    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix2) {
        self.xx += c * other.xx;
        self.xy += c * other.xy;
        self.yy += c * other.yy;
    }
}

/// Which direction family a vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Eight signed vectors on the radius-1 and radius-sqrt(2) circles.
    First,
    /// Eight signed vectors on the radius-sqrt(5) circle.
    Second,
    /// The unsigned axis pair used by the transported scalar.
    Tracer,
}

/// Frame for the rank-one reconstruction: along the direction itself, or
/// along its clockwise perpendicular.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Along,
    Perp,
}

/// Clockwise quarter-turn (k1, k2) -> (k2, -k1); waves with phase along
/// `perp(k)` are constant along `k`.
pub fn perp(k: (i64, i64)) -> (i64, i64) {
    (k.1, -k.0)
}

/// Squared Euclidean length of a lattice vector.
pub fn norm_sq(k: (i64, i64)) -> i64 {
    k.0 * k.0 + k.1 * k.1
}

/// Unit vector along `k`.
pub fn unit(k: (i64, i64)) -> [f64; 2] {
    let len = (norm_sq(k) as f64).sqrt();
    [k.0 as f64 / len, k.1 as f64 / len]
}

/// Unit vector along the clockwise perpendicular of `k`.
pub fn unit_perp(k: (i64, i64)) -> [f64; 2] {
    unit(perp(k))
}

const FIRST_PAIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
const SECOND_PAIRS: [(i64, i64); 4] = [(1, 2), (2, 1), (2, -1), (1, -2)];
const TRACER_DIRS: [(i64, i64); 2] = [(1, 0), (0, 1)];

/// Along-frame coefficient matrices C_p per pair: a_k^2(R) = tr(C_p R).
const ALONG_FIRST: [SymMatrix2; 4] = [
    SymMatrix2 { xx: 3.0 / 8.0, xy: 0.0, yy: -1.0 / 8.0 },
    SymMatrix2 { xx: -1.0 / 8.0, xy: 0.0, yy: 3.0 / 8.0 },
    SymMatrix2 { xx: 1.0 / 8.0, xy: 1.0 / 4.0, yy: 1.0 / 8.0 },
    SymMatrix2 { xx: 1.0 / 8.0, xy: -1.0 / 4.0, yy: 1.0 / 8.0 },
];
const ALONG_SECOND: [SymMatrix2; 4] = [
    SymMatrix2 { xx: -1.0 / 12.0, xy: 5.0 / 32.0, yy: 1.0 / 3.0 },
    SymMatrix2 { xx: 1.0 / 3.0, xy: 5.0 / 32.0, yy: -1.0 / 12.0 },
    SymMatrix2 { xx: 1.0 / 3.0, xy: -5.0 / 32.0, yy: -1.0 / 12.0 },
    SymMatrix2 { xx: -1.0 / 12.0, xy: -5.0 / 32.0, yy: 1.0 / 3.0 },
];

/// Pair involution realizing the perpendicular frame: the perp of pair `p`
/// spans the same line as pair `swap[p]`, so the perp-frame functional of
/// pair `p` is the along-frame functional of `swap[p]`.
const PERP_SWAP_FIRST: [usize; 4] = [1, 0, 3, 2];
const PERP_SWAP_SECOND: [usize; 4] = [2, 3, 0, 1];

/// Floor kept under every squared amplitude on the admissible ball.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// The direction families together with their admissible-ball radius.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    nu: u32,
    first_signed: Vec<(i64, i64)>,
    second_signed: Vec<(i64, i64)>,
    r0: f64,
}

/// Build the frozen direction families.
///
/// `nu` is the requested lattice-radius budget and must admit at least three
/// distinct directions per family; the returned families use vectors of
/// length at most sqrt(5), so any `nu >= 3` budget covers them.  The
/// admissible radius `r0` is computed from the coefficient tables: it is the
/// largest operator radius around the identity on which every squared
/// amplitude provably stays at or above the fixed positive floor.
pub fn build_direction_sets(nu: u32) -> Result<DirectionSet, GeometryError> {
    if nu < 3 {
        return Err(GeometryError::InsufficientDirections { nu });
    }
    let signed = |pairs: &[(i64, i64); 4]| {
        let mut v = Vec::with_capacity(8);
        for &(a, b) in pairs {
            v.push((a, b));
            v.push((-a, -b));
        }
        v
    };
    // Worst (largest) dual norm over both coefficient tables determines how
    // fast a squared amplitude can decay when R moves away from the identity:
    // |tr(C (R - Id))| <= nuclear(C) * op(R - Id).
    let worst = ALONG_FIRST
        .iter()
        .chain(ALONG_SECOND.iter())
        .map(SymMatrix2::nuclear_norm)
        .fold(0.0f64, f64::max);
    let at_identity = 0.25;
    let r0 = (at_identity - AMPLITUDE_FLOOR) / worst;
    Ok(DirectionSet {
        nu,
        first_signed: signed(&FIRST_PAIRS),
        second_signed: signed(&SECOND_PAIRS),
        r0,
    })
}

impl DirectionSet {
    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Operator radius around the identity on which all amplitudes are valid.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Lower bound kept under every squared amplitude on the ball.
    pub fn amplitude_floor(&self) -> f64 {
        AMPLITUDE_FLOOR
    }

    /// All signed vectors of a family (tracer directions are unsigned).
    pub fn signed_vectors(&self, family: FamilyId) -> &[(i64, i64)] {
        match family {
            FamilyId::First => &self.first_signed,
            FamilyId::Second => &self.second_signed,
            FamilyId::Tracer => &TRACER_DIRS,
        }
    }

    /// One representative per +/- pair.
    pub fn pair_representatives(&self, family: FamilyId) -> &'static [(i64, i64)] {
        match family {
            FamilyId::First => &FIRST_PAIRS,
            FamilyId::Second => &SECOND_PAIRS,
            FamilyId::Tracer => &TRACER_DIRS,
        }
    }

    /// Distinct squared radii present in a family.
    pub fn circles(&self, family: FamilyId) -> Vec<i64> {
        let mut radii: Vec<i64> =
            self.pair_representatives(family).iter().map(|&k| norm_sq(k)).collect();
        radii.sort_unstable();
        radii.dedup();
        radii
    }

    pub fn contains(&self, family: FamilyId, k: (i64, i64)) -> bool {
        self.signed_vectors(family).contains(&k)
    }

    fn pair_index(&self, family: FamilyId, k: (i64, i64)) -> Result<usize, GeometryError> {
        let reps = self.pair_representatives(family);
        reps.iter()
            .position(|&p| p == k || (-p.0, -p.1) == k)
            .ok_or(GeometryError::UnknownDirection { k })
    }

    /// Coefficient matrix C with a_k^2(R) = tr(C R) for the given frame.
    ///
    /// The same matrix serves k and -k, so amplitudes are even in k.
    pub fn functional(
        &self,
        family: FamilyId,
        frame: Frame,
        k: (i64, i64),
    ) -> Result<SymMatrix2, GeometryError> {
        let p = self.pair_index(family, k)?;
        let (table, swap): (&[SymMatrix2; 4], &[usize; 4]) = match family {
            FamilyId::First => (&ALONG_FIRST, &PERP_SWAP_FIRST),
            FamilyId::Second => (&ALONG_SECOND, &PERP_SWAP_SECOND),
            FamilyId::Tracer => return Err(GeometryError::UnknownDirection { k }),
        };
        let idx = match frame {
            Frame::Along => p,
            Frame::Perp => swap[p],
        };
        Ok(table[idx])
    }

    /// Squared amplitude a_k^2(R); errors when R leaves the admissible ball.
    pub fn coefficient_squared(
        &self,
        family: FamilyId,
        frame: Frame,
        k: (i64, i64),
        r: &SymMatrix2,
    ) -> Result<f64, GeometryError> {
        let distance = r.distance_from_identity();
        if distance > self.r0 {
            return Err(GeometryError::OutOfBall { distance, radius: self.r0 });
        }
        let c = self.functional(family, frame, k)?;
        Ok(c.pair(r))
    }

    /// Amplitude a_k(R) = sqrt(tr(C R)).
    pub fn coefficient(
        &self,
        family: FamilyId,
        frame: Frame,
        k: (i64, i64),
        r: &SymMatrix2,
    ) -> Result<f64, GeometryError> {
        Ok(self.coefficient_squared(family, frame, k, r)?.sqrt())
    }

    /// Pointwise amplitude field a_k(R(x)) over a grid-sampled tensor.
    ///
    /// The ball condition is enforced at every grid point; the reported
    /// distance on failure is the worst one found.
    pub fn coefficient_field(
        &self,
        family: FamilyId,
        frame: Frame,
        k: (i64, i64),
        r: &SymTensorField,
    ) -> Result<ScalarField, GeometryError> {
        let c = self.functional(family, frame, k)?;
        let grid = r.grid();
        let xx = r.xx.values();
        let xy = r.xy.values();
        let yy = r.yy.values();
        let mut worst = 0.0f64;
        let mut out = Vec::with_capacity(grid.points());
        for idx in 0..grid.points() {
            let m = SymMatrix2::new(xx[idx], xy[idx], yy[idx]);
            worst = worst.max(m.distance_from_identity());
            out.push(c.pair(&m).max(0.0).sqrt());
        }
        if worst > self.r0 {
            return Err(GeometryError::OutOfBall { distance: worst, radius: self.r0 });
        }
        Ok(ScalarField::from_values(grid, out)?)
    }

    /// Axis amplitude for the transported scalar: the component of `v`
    /// along `k`.  May take either sign; only the two axis vectors are
    /// admissible.
    pub fn tracer_coefficient(&self, k: (i64, i64), v: [f64; 2]) -> Result<f64, GeometryError> {
        if !TRACER_DIRS.contains(&k) {
            return Err(GeometryError::UnknownDirection { k });
        }
        Ok(v[0] * k.0 as f64 + v[1] * k.1 as f64)
    }

    /// Pointwise axis amplitude field over a grid-sampled vector.
    pub fn tracer_coefficient_field(
        &self,
        k: (i64, i64),
        v: &VectorField,
    ) -> Result<ScalarField, GeometryError> {
        if !TRACER_DIRS.contains(&k) {
            return Err(GeometryError::UnknownDirection { k });
        }
        let grid = v.grid();
        let vx = v.x.values();
        let vy = v.y.values();
        let mut out = Vec::with_capacity(grid.points());
        for idx in 0..grid.points() {
            out.push(vx[idx] * k.0 as f64 + vy[idx] * k.1 as f64);
        }
        Ok(ScalarField::from_values(grid, out)?)
    }

    /// Direct rank-one sum over all signed vectors of the family; equals the
    /// input matrix on the admissible ball.
    pub fn reconstruct(
        &self,
        family: FamilyId,
        frame: Frame,
        r: &SymMatrix2,
    ) -> Result<SymMatrix2, GeometryError> {
        let mut acc = SymMatrix2::ZERO;
        for &k in self.signed_vectors(family) {
            let a2 = self.coefficient_squared(family, frame, k, r)?;
            let dir = match frame {
                Frame::Along => unit(k),
                Frame::Perp => unit_perp(k),
            };
            acc.add_scaled(a2, &SymMatrix2::outer(dir));
        }
        Ok(acc)
    }

    /// Largest coefficient dual norm within a family.
    pub fn max_nuclear_norm(&self, family: FamilyId) -> f64 {
        let table: &[SymMatrix2; 4] = match family {
            FamilyId::First => &ALONG_FIRST,
            FamilyId::Second => &ALONG_SECOND,
            FamilyId::Tracer => return 1.0,
        };
        table.iter().map(SymMatrix2::nuclear_norm).fold(0.0, f64::max)
    }

    /// Closed-form bound on the j-th derivative of any amplitude of the
    /// family over the operator ball of the given radius.
    ///
    /// The squared amplitude is linear with dual norm at most `nuclear(C)`,
    /// so along any unit-speed matrix path `f` moves at most that fast while
    /// staying above `1/4 - radius * nuclear(C)`; iterating the chain rule on
    /// sqrt gives the factorial-type product below.
    pub fn derivative_bound(&self, family: FamilyId, order: u32, radius: f64) -> f64 {
        let c = self.max_nuclear_norm(family);
        if order == 0 {
            return (0.25 + radius * c).sqrt();
        }
        let f_min = 0.25 - radius * c;
        assert!(f_min > 0.0, "radius beyond admissible ball");
        let mut product = 1.0f64;
        for i in 0..order {
            product *= (0.5 - i as f64).abs();
        }
        product * c.powi(order as i32) * f_min.powf(0.5 - order as f64)
    }

    /// Max derivative bound over orders 0..=order ("C^K" style report).
    pub fn ck_norm_bound(&self, family: FamilyId, order: u32, radius: f64) -> f64 {
        (0..=order).map(|j| self.derivative_bound(family, j, radius)).fold(0.0, f64::max)
    }

    /// Uniform amplitude budget: one hundred times the worst C^K bound over
    /// both velocity families at the full admissible radius.
    pub fn amplitude_budget(&self, order: u32) -> f64 {
        let a = self.ck_norm_bound(FamilyId::First, order, self.r0);
        let b = self.ck_norm_bound(FamilyId::Second, order, self.r0);
        100.0 * a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirs() -> DirectionSet {
        build_direction_sets(5).unwrap()
    }

    #[test]
    fn functionals_are_quarter_at_identity() {
        for c in ALONG_FIRST.iter().chain(ALONG_SECOND.iter()) {
            assert!((c.pair(&SymMatrix2::IDENTITY) - 0.25).abs() < 1e-16);
        }
    }

    #[test]
    fn nuclear_norms_match_closed_forms() {
        for c in &ALONG_FIRST {
            assert!((c.nuclear_norm() - 0.5).abs() < 1e-15);
        }
        for c in &ALONG_SECOND {
            assert!((c.nuclear_norm() - 25.0 / 48.0).abs() < 1e-15);
        }
    }

    #[test]
    fn radius_comes_from_worst_functional() {
        let d = dirs();
        let expect = (0.25 - 1e-6) * 48.0 / 25.0;
        assert!((d.r0() - expect).abs() < 1e-12);
    }

    #[test]
    fn too_small_budget_is_rejected() {
        assert!(matches!(
            build_direction_sets(2),
            Err(GeometryError::InsufficientDirections { nu: 2 })
        ));
    }

    #[test]
    fn identity_reconstructs_exactly_in_both_frames() {
        let d = dirs();
        for family in [FamilyId::First, FamilyId::Second] {
            for frame in [Frame::Along, Frame::Perp] {
                let rec = d.reconstruct(family, frame, &SymMatrix2::IDENTITY).unwrap();
                assert!((rec.xx - 1.0).abs() < 1e-14);
                assert!(rec.xy.abs() < 1e-14);
                assert!((rec.yy - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn generic_matrix_reconstructs_in_both_frames() {
        let d = dirs();
        let r = SymMatrix2::new(1.11, -0.07, 0.93);
        assert!(r.distance_from_identity() < d.r0());
        for family in [FamilyId::First, FamilyId::Second] {
            for frame in [Frame::Along, Frame::Perp] {
                let rec = d.reconstruct(family, frame, &r).unwrap();
                assert!((rec.xx - r.xx).abs() < 1e-13, "{family:?} {frame:?}");
                assert!((rec.xy - r.xy).abs() < 1e-13);
                assert!((rec.yy - r.yy).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn amplitudes_are_even_and_floored() {
        let d = dirs();
        let r = SymMatrix2::new(0.9, 0.1, 1.05);
        for family in [FamilyId::First, FamilyId::Second] {
            for &k in d.pair_representatives(family) {
                let plus = d.coefficient(family, Frame::Along, k, &r).unwrap();
                let minus = d.coefficient(family, Frame::Along, (-k.0, -k.1), &r).unwrap();
                assert_eq!(plus, minus);
                assert!(plus * plus >= d.amplitude_floor() - 1e-15);
            }
        }
    }

    #[test]
    fn out_of_ball_is_rejected_with_distance() {
        let d = dirs();
        let r = SymMatrix2::new(1.0 + 2.0 * d.r0(), 0.0, 1.0);
        match d.coefficient_squared(FamilyId::First, Frame::Perp, (1, 0), &r) {
            Err(GeometryError::OutOfBall { distance, radius }) => {
                assert!((distance - 2.0 * d.r0()).abs() < 1e-12);
                assert!((radius - d.r0()).abs() < 1e-15);
            }
            other => panic!("expected out-of-ball rejection, got {other:?}"),
        }
    }

    #[test]
    fn frames_are_orthonormal() {
        let d = dirs();
        for family in [FamilyId::First, FamilyId::Second, FamilyId::Tracer] {
            for &k in d.signed_vectors(family) {
                let u = unit(k);
                let v = unit_perp(k);
                assert!((u[0] * u[0] + u[1] * u[1] - 1.0).abs() < 1e-15);
                assert!((v[0] * v[0] + v[1] * v[1] - 1.0).abs() < 1e-15);
                assert!((u[0] * v[0] + u[1] * v[1]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tracer_components_resum_to_the_vector() {
        let d = dirs();
        let v = [0.37, -1.42];
        let mut acc = [0.0f64; 2];
        for &k in d.signed_vectors(FamilyId::Tracer) {
            let a = d.tracer_coefficient(k, v).unwrap();
            acc[0] += a * k.0 as f64;
            acc[1] += a * k.1 as f64;
        }
        assert!((acc[0] - v[0]).abs() < 1e-15);
        assert!((acc[1] - v[1]).abs() < 1e-15);
        assert!(d.tracer_coefficient((1, 1), v).is_err());
    }

    #[test]
    fn families_share_no_vectors_and_split_by_circles() {
        let d = dirs();
        for k in d.signed_vectors(FamilyId::First) {
            assert!(!d.signed_vectors(FamilyId::Second).contains(k));
        }
        assert_eq!(d.circles(FamilyId::First), vec![1, 2]);
        assert_eq!(d.circles(FamilyId::Second), vec![5]);
        assert_eq!(d.circles(FamilyId::Tracer), vec![1]);
    }

    #[test]
    fn derivative_bounds_decrease_with_radius_and_grow_with_order() {
        let d = dirs();
        let full = d.derivative_bound(FamilyId::Second, 3, d.r0());
        let half = d.derivative_bound(FamilyId::Second, 3, 0.5 * d.r0());
        assert!(full > half);
        let lower = d.derivative_bound(FamilyId::Second, 2, d.r0());
        assert!(full > lower);
        assert!(d.amplitude_budget(3).is_finite());
        assert!(d.amplitude_budget(3) > 100.0);
    }

    #[test]
    fn coefficient_field_matches_pointwise_evaluation() {
        let d = dirs();
        let grid = spectral_core::Grid::new(16).unwrap();
        let xx = ScalarField::from_fn(grid, |x, _| 1.0 + 0.05 * (2.0 * std::f64::consts::PI * x).cos());
        let xy = ScalarField::from_fn(grid, |_, y| 0.03 * (2.0 * std::f64::consts::PI * y).sin());
        let yy = ScalarField::from_fn(grid, |_, _| 0.97);
        let tensor = SymTensorField::new(xx, xy, yy).unwrap();
        let field = d.coefficient_field(FamilyId::First, Frame::Perp, (1, 1), &tensor).unwrap();
        let m = SymMatrix2::new(tensor.xx.at(3, 5), tensor.xy.at(3, 5), tensor.yy.at(3, 5));
        let direct = d.coefficient(FamilyId::First, Frame::Perp, (1, 1), &m).unwrap();
        assert!((field.at(3, 5) - direct).abs() < 1e-15);
    }
}
