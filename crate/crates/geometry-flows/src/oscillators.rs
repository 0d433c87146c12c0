//! One-periodic temporal oscillators with pairwise disjoint supports.
//!
//! Each active (direction, level) pair owns a private slot inside the unit
//! period and carries a bump `g` normalized to unit L^2 mass there, so
//! products of distinct members vanish identically.  The complementary
//! shape `f = 1 - g^2` has zero mean, and its antiderivative stays bounded
//! by the slot period divided by the playback rate.  One trailing slot is
//! reserved and never assigned, guaranteeing a quiet sub-interval of every
//! period where all oscillators vanish.

use crate::directions::{DirectionSet, FamilyId};
use crate::error::GeometryError;
use crate::step::{bump01, bump01_sq_mass};

/// Which direction families participate per level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionPolicy {
    /// Both velocity families plus the tracer axes (18 directions/level).
    Union,
    /// Only the first velocity family plus the tracer axes (10/level);
    /// keeps every perpendicular component within one lattice step, which
    /// coarse grids can resolve.
    FirstOnly,
}

/// Identifies one oscillator: a signed direction at a construction level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaveKey {
    pub family: FamilyId,
    pub k: (i64, i64),
    /// Level index, 1-based up to the configured level count.
    pub level: u32,
}

/// The oscillator family for one stage.
#[derive(Clone, Debug)]
pub struct TemporalOscillators {
    policy: DirectionPolicy,
    levels: u32,
    keys: Vec<WaveKey>,
    slot_width: f64,
    margin: f64,
    active_width: f64,
    amplitude: f64,
}

/// Build the oscillator family.
///
/// `samples_per_period` is the number of solver samples falling inside one
/// oscillator period at playback; every slot must capture at least 16 of
/// them.
pub fn temporal_oscillators(
    dirs: &DirectionSet,
    policy: DirectionPolicy,
    levels: u32,
    samples_per_period: usize,
) -> Result<TemporalOscillators, GeometryError> {
    assert!(levels >= 1, "at least one level");
    let mut keys = Vec::new();
    for level in 1..=levels {
        let mut push_family = |family: FamilyId| {
            for &k in dirs.signed_vectors(family) {
                keys.push(WaveKey { family, k, level });
            }
        };
        push_family(FamilyId::First);
        if policy == DirectionPolicy::Union {
            push_family(FamilyId::Second);
        }
        push_family(FamilyId::Tracer);
    }
    let slots = keys.len() + 1;
    if samples_per_period / slots < 16 {
        return Err(GeometryError::InsufficientSlots {
            slots,
            samples: samples_per_period,
            needed: 16,
        });
    }
    let slot_width = 1.0 / slots as f64;
    let margin = slot_width / 8.0;
    let active_width = 0.75 * slot_width;
    let amplitude = 1.0 / (active_width * bump01_sq_mass()).sqrt();
    Ok(TemporalOscillators {
        policy,
        levels,
        keys,
        slot_width,
        margin,
        active_width,
        amplitude,
    })
}

impl TemporalOscillators {
    pub fn policy(&self) -> DirectionPolicy {
        self.policy
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Assigned oscillators, in slot order.
    pub fn keys(&self) -> &[WaveKey] {
        &self.keys
    }

    /// Total slots including the reserved trailing one.
    pub fn slot_count(&self) -> usize {
        self.keys.len() + 1
    }

    pub fn slot_of(&self, key: &WaveKey) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    /// Active support of a slot inside the unit period.
    pub fn slot_support(&self, slot: usize) -> (f64, f64) {
        let start = slot as f64 * self.slot_width + self.margin;
        (start, start + self.active_width)
    }

    /// The reserved trailing sub-interval where every oscillator vanishes.
    pub fn quiet_interval(&self) -> (f64, f64) {
        (self.keys.len() as f64 * self.slot_width, 1.0)
    }

    /// Oscillator value by slot index at (periodic) time `t`.
    pub fn g_slot(&self, slot: usize, t: f64) -> f64 {
        let (start, _) = self.slot_support(slot);
        let u = t.rem_euclid(1.0);
        self.amplitude * bump01((u - start) / self.active_width)
    }

    /// Oscillator value for a key; errors on keys outside the family.
    pub fn g(&self, key: &WaveKey, t: f64) -> Result<f64, GeometryError> {
        let slot = self
            .slot_of(key)
            .ok_or(GeometryError::UnknownDirection { k: key.k })?;
        Ok(self.g_slot(slot, t))
    }

    /// Complementary shape `1 - g^2` (zero mean over one period).
    pub fn f(&self, key: &WaveKey, t: f64) -> Result<f64, GeometryError> {
        let g = self.g(key, t)?;
        Ok(1.0 - g * g)
    }

    pub fn f_slot(&self, slot: usize, t: f64) -> f64 {
        let g = self.g_slot(slot, t);
        1.0 - g * g
    }

    /// L^2 mass of one oscillator over a period, by independent quadrature.
    pub fn mass(&self, slot: usize) -> f64 {
        crate::step::integral_01(|u| self.g_slot(slot, u).powi(2), 1 << 12)
    }

    /// Measured sup over t of |integral_0^t (1 - g^2)(rate * s) ds|.
    ///
    /// The integrand averages to zero over each fast period, so the sup is
    /// the sup of a periodic shape divided by the playback rate; it never
    /// exceeds 2 / rate.
    pub fn antiderivative_sup(&self, slot: usize, rate: f64) -> f64 {
        assert!(rate > 0.0);
        let n = 1 << 15;
        let h = 1.0 / n as f64;
        let mut acc = 0.0f64;
        let mut sup = 0.0f64;
        let mut prev = self.g_slot(slot, 0.0).powi(2);
        for i in 1..=n {
            let u = i as f64 * h;
            let cur = self.g_slot(slot, u).powi(2);
            acc += 0.5 * (prev + cur) * h;
            prev = cur;
            sup = sup.max((u - acc).abs());
        }
        sup / rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::build_direction_sets;

    fn family(policy: DirectionPolicy) -> TemporalOscillators {
        let dirs = build_direction_sets(5).unwrap();
        temporal_oscillators(&dirs, policy, 2, 1000).unwrap()
    }

    #[test]
    fn slot_counts_follow_policy() {
        assert_eq!(family(DirectionPolicy::Union).slot_count(), 37);
        assert_eq!(family(DirectionPolicy::FirstOnly).slot_count(), 21);
    }

    #[test]
    fn insufficient_sampling_is_rejected() {
        let dirs = build_direction_sets(5).unwrap();
        match temporal_oscillators(&dirs, DirectionPolicy::FirstOnly, 2, 100) {
            Err(GeometryError::InsufficientSlots { slots: 21, samples: 100, needed: 16 }) => {}
            other => panic!("expected insufficient slots, got {other:?}"),
        }
    }

    #[test]
    fn masses_are_unit() {
        let fam = family(DirectionPolicy::FirstOnly);
        for slot in [0, 7, 19] {
            assert!((fam.mass(slot) - 1.0).abs() < 1e-10, "slot {slot}");
        }
    }

    #[test]
    fn distinct_members_never_overlap() {
        let fam = family(DirectionPolicy::FirstOnly);
        let n = fam.keys().len();
        for t in 0..5000 {
            let t = t as f64 / 5000.0;
            let mut active = 0;
            for slot in 0..n {
                if fam.g_slot(slot, t) != 0.0 {
                    active += 1;
                }
            }
            assert!(active <= 1, "two oscillators live at t = {t}");
        }
    }

    #[test]
    fn quiet_interval_is_quiet() {
        let fam = family(DirectionPolicy::Union);
        let (a, b) = fam.quiet_interval();
        assert!(b - a > 0.02);
        for i in 0..200 {
            let t = a + (b - a) * i as f64 / 200.0;
            for slot in 0..fam.keys().len() {
                assert_eq!(fam.g_slot(slot, t), 0.0);
            }
        }
    }

    #[test]
    fn f_has_zero_mean_and_bounded_antiderivative() {
        let fam = family(DirectionPolicy::FirstOnly);
        let mean = crate::step::integral_01(|u| fam.f_slot(3, u), 1 << 12);
        assert!(mean.abs() < 1e-10);
        let rate = 1.4;
        let sup = fam.antiderivative_sup(3, rate);
        assert!(sup <= 2.0 / rate);
        assert!(sup > 0.0);
    }

    #[test]
    fn keys_resolve_to_their_slots() {
        let fam = family(DirectionPolicy::FirstOnly);
        let key = WaveKey { family: FamilyId::Tracer, k: (0, 1), level: 2 };
        let slot = fam.slot_of(&key).unwrap();
        assert_eq!(slot, 19); // second level block: 10 + 8 velocity + tracer e2
        let t = 0.5 * (fam.slot_support(slot).0 + fam.slot_support(slot).1);
        assert!(fam.g(&key, t).unwrap() > 0.0);
        let missing = WaveKey { family: FamilyId::Second, k: (1, 2), level: 1 };
        assert!(fam.g(&missing, 0.3).is_err());
    }
}
