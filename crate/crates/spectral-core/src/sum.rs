//! Deterministic compensated summation.
//!
//! Every reduction in this workspace runs in a fixed serial order with
//! Neumaier compensation, so results are bitwise reproducible for a given
//! grid regardless of thread count.

/// Neumaier-compensated sum over a slice, in storage order.
pub fn sum(values: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Compensated sum of `f(v)` over a slice, in storage order.
pub fn sum_by(values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &v in values {
        let v = f(v);
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Compensated sum of `f(a_i, b_i)` over two equal-length slices.
pub fn sum_zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let v = f(x, y);
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}
