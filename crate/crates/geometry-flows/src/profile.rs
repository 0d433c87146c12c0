//! One-dimensional wave profiles and their lifts to plane waves that are
//! constant along a chosen lattice direction.
//!
//! A profile is a mean-free periodic shape `phi` of unit L^2 mass together
//! with its periodic antiderivative `psi`.  Lifting composes the profile
//! with the scaled phase `lambda * kperp . x`, yielding a field that varies
//! only across the direction `k` and is exactly invariant under lattice
//! translations along `k`.  Support offsets are dyadic rationals so that
//! support membership tests on power-of-two grids are exact in floating
//! point.

use std::f64::consts::PI;

use spectral_core::ops;
use spectral_core::{Grid, ScalarField};

use crate::error::GeometryError;
use crate::step::{bump01, bump01_deriv, bump01_deriv_sq_mass};

/// Denominator for dyadic profile offsets and widths.
pub const OFFSET_DENOM: u32 = 1024;

/// Wave shape of a shear profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileShape {
    /// Full-period sinusoid; exactly band-limited, no compact support.
    Harmonic,
    /// Compactly supported bump slope with support width `width_num / 1024`.
    CompactBump { width_num: u32 },
}

/// A mean-free unit-mass 1D wave profile with periodic antiderivative.
#[derive(Clone, Copy, Debug)]
pub struct ShearProfile {
    shape: ProfileShape,
    offset_num: u32,
    scale: f64,
}

/// Build a shear profile with the given shape and dyadic support offset.
pub fn shear_profile(shape: ProfileShape, offset_num: u32) -> Result<ShearProfile, GeometryError> {
    if offset_num >= OFFSET_DENOM {
        return Err(GeometryError::OverlappingWindows {
            detail: format!("profile offset {offset_num}/{OFFSET_DENOM} not inside [0, 1)"),
        });
    }
    let scale = match shape {
        ProfileShape::Harmonic => std::f64::consts::SQRT_2,
        ProfileShape::CompactBump { width_num } => {
            if width_num == 0 || width_num >= OFFSET_DENOM {
                return Err(GeometryError::OverlappingWindows {
                    detail: format!(
                        "profile width {width_num}/{OFFSET_DENOM} must lie strictly inside (0, 1)"
                    ),
                });
            }
            let width = width_num as f64 / OFFSET_DENOM as f64;
            1.0 / (width * bump01_deriv_sq_mass()).sqrt()
        }
    };
    Ok(ShearProfile { shape, offset_num, scale })
}

impl ShearProfile {
    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    /// Support offset as a fraction of the period.
    pub fn offset(&self) -> f64 {
        self.offset_num as f64 / OFFSET_DENOM as f64
    }

    pub fn offset_num(&self) -> u32 {
        self.offset_num
    }

    /// Width of the varying part: the full period for the harmonic shape.
    pub fn width(&self) -> f64 {
        match self.shape {
            ProfileShape::Harmonic => 1.0,
            ProfileShape::CompactBump { width_num } => width_num as f64 / OFFSET_DENOM as f64,
        }
    }

    /// Support interval (mod 1) of the wave shape; None when full-period.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.shape {
            ProfileShape::Harmonic => None,
            ProfileShape::CompactBump { .. } => Some((self.offset(), self.offset() + self.width())),
        }
    }

    /// The wave shape: mean-free with unit L^2 mass over one period.
    pub fn phi(&self, s: f64) -> f64 {
        let u = (s - self.offset()).rem_euclid(1.0);
        match self.shape {
            ProfileShape::Harmonic => self.scale * (2.0 * PI * u).sin(),
            ProfileShape::CompactBump { .. } => {
                let w = self.width();
                if u < w {
                    self.scale * bump01_deriv(u / w)
                } else {
                    0.0
                }
            }
        }
    }

    /// Periodic antiderivative of [`phi`](Self::phi).
    pub fn psi(&self, s: f64) -> f64 {
        let u = (s - self.offset()).rem_euclid(1.0);
        match self.shape {
            ProfileShape::Harmonic => -self.scale / (2.0 * PI) * (2.0 * PI * u).cos(),
            ProfileShape::CompactBump { .. } => {
                let w = self.width();
                if u < w {
                    self.scale * w * bump01(u / w)
                } else {
                    0.0
                }
            }
        }
    }

    /// Profile value at the scaled phase of an arbitrary plane point.
    pub fn lifted_value(&self, lambda: u64, k: (i64, i64), x1: f64, x2: f64) -> f64 {
        self.phi(lambda as f64 * (k.1 as f64 * x1 - k.0 as f64 * x2))
    }

    /// Antiderivative value at the scaled phase of an arbitrary plane point.
    pub fn lifted_stream_value(&self, lambda: u64, k: (i64, i64), x1: f64, x2: f64) -> f64 {
        self.psi(lambda as f64 * (k.1 as f64 * x1 - k.0 as f64 * x2))
    }
}

/// Exact lattice phase: `lambda * kperp . x mod 1` at grid index, as an
/// integer numerator over the grid size.
fn lattice_phase(n: i64, lambda: i64, k: (i64, i64), i1: i64, i2: i64) -> i64 {
    (lambda * (k.1 * i1 - k.0 * i2)).rem_euclid(n)
}

fn resolvability(
    grid: Grid,
    lambda: u64,
    k: (i64, i64),
    width: f64,
) -> Result<(), GeometryError> {
    let stride = lambda as f64 * (k.0.abs().max(k.1.abs()).max(1)) as f64;
    let points = width * grid.n() as f64 / stride;
    if points < 8.0 {
        return Err(GeometryError::UnresolvableSupport { points, needed: 8.0 });
    }
    Ok(())
}

/// Sample `phi(lambda * kperp . x)` on the grid with exact integer phase
/// reduction; errors when fewer than eight grid steps cross the support.
pub fn lifted_phi(
    profile: &ShearProfile,
    grid: Grid,
    lambda: u64,
    k: (i64, i64),
) -> Result<ScalarField, GeometryError> {
    resolvability(grid, lambda, k, profile.width())?;
    Ok(sample_lifted(grid, lambda, k, |s| profile.phi(s)))
}

/// Sample the antiderivative `psi(lambda * kperp . x)` on the grid.
pub fn lifted_psi(
    profile: &ShearProfile,
    grid: Grid,
    lambda: u64,
    k: (i64, i64),
) -> Result<ScalarField, GeometryError> {
    resolvability(grid, lambda, k, profile.width())?;
    Ok(sample_lifted(grid, lambda, k, |s| profile.psi(s)))
}

fn sample_lifted(
    grid: Grid,
    lambda: u64,
    k: (i64, i64),
    f: impl Fn(f64) -> f64,
) -> ScalarField {
    let n = grid.n();
    let mut values = vec![0.0f64; grid.points()];
    // Phases repeat on rows/columns; evaluate per distinct integer phase.
    let mut cache: Vec<Option<f64>> = vec![None; n];
    for i2 in 0..n {
        for i1 in 0..n {
            let m = lattice_phase(n as i64, lambda as i64, k, i1 as i64, i2 as i64) as usize;
            let v = *cache[m].get_or_insert_with(|| f(m as f64 / n as f64));
            values[grid.index(i1, i2)] = v;
        }
    }
    ScalarField::from_values(grid, values).expect("length matches grid")
}

/// Sup of the spectral directional derivative of `field` along `k`.
///
/// Exactly lifted harmonics and axis-aligned compact lifts stay below 1e-10;
/// diagonal compact lifts alias on coarse grids, so this value is a
/// diagnostic there rather than a gate.
pub fn constancy_defect(field: &ScalarField, k: (i64, i64)) -> f64 {
    let grad = ops::gradient(field);
    let gx = grad.x.values();
    let gy = grad.y.values();
    let mut sup = 0.0f64;
    for idx in 0..field.grid().points() {
        sup = sup.max((k.0 as f64 * gx[idx] + k.1 as f64 * gy[idx]).abs());
    }
    sup
}

/// Max change of `field` under the exact lattice translation by `k` grid
/// steps; zero (to the bit) for any lifted profile.
pub fn translation_defect(field: &ScalarField, k: (i64, i64)) -> f64 {
    let grid = field.grid();
    let n = grid.n() as i64;
    let mut sup = 0.0f64;
    for i2 in 0..grid.n() {
        for i1 in 0..grid.n() {
            let j1 = (i1 as i64 + k.0).rem_euclid(n) as usize;
            let j2 = (i2 as i64 + k.1).rem_euclid(n) as usize;
            sup = sup.max((field.at(j1, j2) - field.at(i1, i2)).abs());
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::integral_01;

    #[test]
    fn harmonic_profile_is_normalized_and_mean_free() {
        let p = shear_profile(ProfileShape::Harmonic, 0).unwrap();
        let mass = integral_01(|s| p.phi(s) * p.phi(s), 1 << 10);
        assert!((mass - 1.0).abs() < 1e-12);
        let mean = integral_01(|s| p.phi(s), 1 << 10);
        assert!(mean.abs() < 1e-14);
    }

    #[test]
    fn bump_profile_is_normalized_and_mean_free() {
        let p = shear_profile(ProfileShape::CompactBump { width_num: 256 }, 128).unwrap();
        let mass = integral_01(|s| p.phi(s) * p.phi(s), 1 << 11);
        assert!((mass - 1.0).abs() < 1e-10);
        let mean = integral_01(|s| p.phi(s), 1 << 11);
        assert!(mean.abs() < 1e-12);
        // support respects the offset
        assert_eq!(p.support(), Some((0.125, 0.375)));
        assert_eq!(p.phi(0.12), 0.0);
        assert_eq!(p.phi(0.4), 0.0);
        // probe off the midpoint: the slope shape vanishes at dead center
        assert!(p.phi(0.2).abs() > 0.0);
    }

    #[test]
    fn psi_is_the_antiderivative_of_phi() {
        let h = 1e-6;
        for (shape, off) in [
            (ProfileShape::Harmonic, 0),
            (ProfileShape::CompactBump { width_num: 256 }, 512),
        ] {
            let p = shear_profile(shape, off).unwrap();
            for s in [0.3, 0.55, 0.61, 0.72] {
                let fd = (p.psi(s + h) - p.psi(s - h)) / (2.0 * h);
                assert!(
                    (fd - p.phi(s)).abs() < 1e-6,
                    "{shape:?} at {s}: fd {fd} vs phi {}",
                    p.phi(s)
                );
            }
        }
    }

    #[test]
    fn lifted_harmonic_is_constant_along_k() {
        let grid = Grid::new(32).unwrap();
        let p = shear_profile(ProfileShape::Harmonic, 0).unwrap();
        for k in [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)] {
            let field = lifted_phi(&p, grid, 2, k).unwrap();
            assert!(constancy_defect(&field, k) < 1e-10, "direction {k:?}");
            assert_eq!(translation_defect(&field, k), 0.0);
        }
    }

    #[test]
    fn lifted_bump_axis_is_exactly_constant_and_diagonal_translates() {
        let grid = Grid::new(64).unwrap();
        let p = shear_profile(ProfileShape::CompactBump { width_num: 256 }, 0).unwrap();
        let axis = lifted_phi(&p, grid, 2, (0, 1)).unwrap();
        // kperp of (0,1) is (1,0): varies in x1, constant along x2 = along k
        assert!(constancy_defect(&axis, (0, 1)) < 1e-10);
        assert_eq!(translation_defect(&axis, (0, 1)), 0.0);
        let diag = lifted_phi(&p, grid, 2, (1, 1)).unwrap();
        assert_eq!(translation_defect(&diag, (1, 1)), 0.0);
    }

    #[test]
    fn lifted_values_match_direct_phase_evaluation() {
        let grid = Grid::new(32).unwrap();
        let p = shear_profile(ProfileShape::CompactBump { width_num: 512 }, 256).unwrap();
        let field = lifted_phi(&p, grid, 1, (1, -1)).unwrap();
        for (i1, i2) in [(0, 0), (3, 7), (20, 11)] {
            let (x1, x2) = grid.point(i1, i2);
            assert!((field.at(i1, i2) - p.lifted_value(1, (1, -1), x1, x2)).abs() < 1e-12);
        }
        let stream = lifted_psi(&p, grid, 1, (1, -1)).unwrap();
        assert!((stream.at(5, 9) - p.lifted_stream_value(1, (1, -1), grid.point(5, 9).0, grid.point(5, 9).1)).abs() < 1e-12);
    }

    #[test]
    fn narrow_support_is_rejected() {
        let grid = Grid::new(16).unwrap();
        let p = shear_profile(ProfileShape::CompactBump { width_num: 256 }, 0).unwrap();
        match lifted_phi(&p, grid, 1, (0, 1)) {
            Err(GeometryError::UnresolvableSupport { points, needed }) => {
                assert!((points - 4.0).abs() < 1e-12);
                assert_eq!(needed, 8.0);
            }
            other => panic!("expected unresolvable support, got {other:?}"),
        }
    }

    #[test]
    fn bad_offsets_and_widths_are_rejected() {
        assert!(shear_profile(ProfileShape::Harmonic, 1024).is_err());
        assert!(shear_profile(ProfileShape::CompactBump { width_num: 0 }, 0).is_err());
        assert!(shear_profile(ProfileShape::CompactBump { width_num: 1024 }, 0).is_err());
    }
}
