//! Scalar C^infinity building blocks: the compact unit bump, the saturating
//! smooth step, plateau windows, and measured-derivative helpers.
//!
//! Every cutoff family in this crate is assembled from these three scalar
//! shapes, so their conventions are fixed here once:
//! * `bump01` vanishes outside (0,1) with all derivatives;
//! * `smooth_step` is exactly 0 for s <= 0 and exactly 1 for s >= 1;
//! * `window` saturates at exactly 1 on its plateau.

use std::sync::OnceLock;

/// exp(-1/s) for s > 0, else 0. The basic flat-at-zero factor.
#[inline]
pub fn flat_exp(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Derivative of [`flat_exp`]: exp(-1/s)/s^2 for s > 0, else 0.
#[inline]
pub fn flat_exp_deriv(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp() / (s * s)
    } else {
        0.0
    }
}

/// Unit bump: exp(-1/(s(1-s))) on (0,1), zero elsewhere.
///
/// Maximum value exp(-4) at s = 1/2; underflow near the endpoints rounds
/// gracefully to zero.
#[inline]
pub fn bump01(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        flat_exp(s * (1.0 - s))
    } else {
        0.0
    }
}

/// Derivative of [`bump01`].
#[inline]
pub fn bump01_deriv(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        let d = s * (1.0 - s);
        bump01(s) * (1.0 - 2.0 * s) / (d * d)
    } else {
        0.0
    }
}

/// Smooth step: 0 for s <= 0, 1 for s >= 1, strictly increasing between.
///
/// S(s) = B(s) / (B(s) + B(1-s)) with B = exp(-1/s); the denominator is
/// bounded below by 2 exp(-2) on (0,1), and the saturation at 0 and 1 is
/// exact because one of the two terms vanishes identically.
#[inline]
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = flat_exp(s);
        let b = flat_exp(1.0 - s);
        a / (a + b)
    }
}

/// Derivative of [`smooth_step`]; zero outside (0,1).
#[inline]
pub fn smooth_step_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let a = flat_exp(s);
        let b = flat_exp(1.0 - s);
        let da = flat_exp_deriv(s);
        let db = flat_exp_deriv(1.0 - s);
        let sum = a + b;
        (da * b + a * db) / (sum * sum)
    }
}

/// Plateau window: rises 0 -> 1 over [rise_start, rise_end], holds exactly 1
/// on [rise_end, fall_start], falls back to 0 over [fall_start, fall_end].
///
/// Requires rise_start < rise_end <= fall_start < fall_end; the caller
/// guarantees ordering (checked by the cutoff constructors, not here).
#[inline]
pub fn window(t: f64, rise_start: f64, rise_end: f64, fall_start: f64, fall_end: f64) -> f64 {
    let up = smooth_step((t - rise_start) / (rise_end - rise_start));
    let down = smooth_step((fall_end - t) / (fall_end - fall_start));
    up * down
}

/// Time derivative of [`window`].
#[inline]
pub fn window_deriv(t: f64, rise_start: f64, rise_end: f64, fall_start: f64, fall_end: f64) -> f64 {
    let wu = rise_end - rise_start;
    let wd = fall_end - fall_start;
    let up = smooth_step((t - rise_start) / wu);
    let down = smooth_step((fall_end - t) / wd);
    let dup = smooth_step_deriv((t - rise_start) / wu) / wu;
    let ddown = -smooth_step_deriv((fall_end - t) / wd) / wd;
    dup * down + up * ddown
}

/// Composite-Simpson quadrature of `f` over [0,1] with `2m` panels.
pub fn integral_01(f: impl Fn(f64) -> f64, m: usize) -> f64 {
    let n = 2 * m.max(1);
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

fn cached(cell: &OnceLock<f64>, f: impl Fn(f64) -> f64) -> f64 {
    *cell.get_or_init(|| integral_01(f, 1 << 13))
}

/// Integral of bump01 over its support (cached).
pub fn bump01_mass() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    cached(&CELL, bump01)
}

/// Integral of bump01^2 over its support (cached).
pub fn bump01_sq_mass() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    cached(&CELL, |s| bump01(s) * bump01(s))
}

/// Integral of bump01'^2 over the support (cached); used to normalize the
/// compact shear profile whose slope is the wave shape.
pub fn bump01_deriv_sq_mass() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    cached(&CELL, |s| {
        let d = bump01_deriv(s);
        d * d
    })
}

/// Supremum of the N-th derivative of `f` over [a, b], estimated with the
/// central difference stencil on `samples` interior points.
///
/// This is a diagnostic for measured cutoff constants, not a proof device:
/// second-order accurate, with the step chosen as a fixed fraction of the
/// interval so that roundoff stays far below the reported magnitudes.
pub fn measured_derivative_sup(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    order: u32,
    samples: usize,
) -> f64 {
    assert!(b > a, "empty interval");
    let samples = samples.max(8);
    if order == 0 {
        let mut sup = 0.0f64;
        for i in 0..=samples {
            let t = a + (b - a) * i as f64 / samples as f64;
            sup = sup.max(f(t).abs());
        }
        return sup;
    }
    let h = (b - a) / 2048.0;
    let n = order as i64;
    // Central stencil for the n-th derivative: h^-n sum_j (-1)^j C(n,j) f(x + (n/2 - j) h).
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    let mut c = 1.0f64;
    for j in 0..=n {
        coeffs.push(if j % 2 == 0 { c } else { -c });
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    let mut sup = 0.0f64;
    for i in 0..=samples {
        let t = a + (b - a) * i as f64 / samples as f64;
        let mut acc = 0.0;
        for (j, cj) in coeffs.iter().enumerate() {
            let offset = (n as f64 / 2.0 - j as f64) * h;
            acc += cj * f(t + offset);
        }
        sup = sup.max((acc / h.powi(order as i32)).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_vanishes_outside_and_peaks_in_middle() {
        assert_eq!(bump01(0.0), 0.0);
        assert_eq!(bump01(1.0), 0.0);
        assert_eq!(bump01(-0.3), 0.0);
        assert_eq!(bump01(1.7), 0.0);
        assert_abs_diff_eq!(bump01(0.5), (-4.0f64).exp(), epsilon = 1e-18);
        assert!(bump01(0.25) > 0.0);
    }

    #[test]
    fn step_saturates_exactly() {
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(-2.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(5.0), 1.0);
        let mid = smooth_step(0.5);
        assert_abs_diff_eq!(mid, 0.5, epsilon = 1e-15);
        // complementary symmetry
        for s in [0.1, 0.3, 0.45] {
            assert_abs_diff_eq!(smooth_step(s) + smooth_step(1.0 - s), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn window_plateau_is_exactly_one() {
        for t in [0.3, 0.4, 0.5, 0.6] {
            assert_eq!(window(t, 0.0, 0.25, 0.65, 0.9), 1.0);
        }
        assert_eq!(window(-0.1, 0.0, 0.25, 0.65, 0.9), 0.0);
        assert_eq!(window(0.95, 0.0, 0.25, 0.65, 0.9), 0.0);
        let rising = window(0.1, 0.0, 0.25, 0.65, 0.9);
        assert!(rising > 0.0 && rising < 1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for s in [0.17, 0.42, 0.73, 0.91] {
            let fd_step = (smooth_step(s + h) - smooth_step(s - h)) / (2.0 * h);
            assert_abs_diff_eq!(smooth_step_deriv(s), fd_step, epsilon = 1e-7);
            let fd_bump = (bump01(s + h) - bump01(s - h)) / (2.0 * h);
            assert_abs_diff_eq!(bump01_deriv(s), fd_bump, epsilon = 1e-7);
        }
        let fd_win = (window(0.2 + h, 0.0, 0.25, 0.65, 0.9) - window(0.2 - h, 0.0, 0.25, 0.65, 0.9))
            / (2.0 * h);
        assert_abs_diff_eq!(window_deriv(0.2, 0.0, 0.25, 0.65, 0.9), fd_win, epsilon = 1e-7);
    }

    #[test]
    fn simpson_matches_closed_forms() {
        let quad = integral_01(|s| s * s, 1 << 10);
        assert_abs_diff_eq!(quad, 1.0 / 3.0, epsilon = 1e-12);
        let wave = integral_01(|s| (2.0 * std::f64::consts::PI * s).sin().powi(2), 1 << 10);
        assert_abs_diff_eq!(wave, 0.5, epsilon = 1e-12);
        assert!(bump01_mass() > 0.0 && bump01_mass() < 0.02);
        assert!(bump01_sq_mass() > 0.0);
        assert!(bump01_deriv_sq_mass() > 0.0);
    }

    #[test]
    fn measured_derivative_agrees_with_analytic() {
        let sup1 = measured_derivative_sup(smooth_step, 0.0, 1.0, 1, 512);
        let analytic = measured_derivative_sup(smooth_step_deriv, 0.0, 1.0, 0, 2048);
        assert!((sup1 - analytic).abs() / analytic < 1e-3);
        // order-2 on a sine: sup |d^2 sin(2 pi s)| = (2 pi)^2
        let sup2 = measured_derivative_sup(
            |s| (2.0 * std::f64::consts::PI * s).sin(),
            0.0,
            1.0,
            2,
            512,
        );
        let expect = (2.0 * std::f64::consts::PI).powi(2);
        assert!((sup2 - expect).abs() / expect < 1e-3);
    }
}
