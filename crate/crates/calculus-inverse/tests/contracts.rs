//! Contract gates: right-inverse residuals, oscillatory reassembly, the
//! lambda-gain ladder, support containment, and interpolation budgets.

use calculus_inverse::{
    inv_div_tensor, inv_div_vector, osc_inverse_div, osc_inverse_div_scalar, Interpolant, PhaseMap,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::fft::{self, Spectrum};
use spectral_core::{ops, Grid, ScalarField, VectorField};

const PI: f64 = std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * PI;

fn random_band_limited(grid: Grid, max_mode: i64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Spectrum::zeros(grid);
    for k2 in -max_mode..=max_mode {
        for k1 in 0..=max_mode {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            *s.coeff_mut(k1, k2) = c;
            *s.coeff_mut(-k1, -k2) = c.conj();
        }
    }
    fft::inverse(&s)
}

fn gentle_map(grid: Grid, scale: f64) -> PhaseMap {
    let disp = VectorField::from_fn(grid, |x1, x2| {
        (
            scale * ((TWO_PI * x2).sin() + 0.4 * (TWO_PI * (x1 + x2)).cos()),
            scale * (TWO_PI * x1).cos(),
        )
    });
    PhaseMap::new(disp)
}

/// Compactly supported window with spectral tail far below the gates:
/// 16-fold convolution of a box, synthesized from its exact coefficients
/// sinc^16(pi k h), centered at 1/4 per axis, then peak-normalized.
fn spline_bump(grid: Grid, knot_h: f64) -> ScalarField {
    let order = 16i32;
    let c = grid.dealias_cutoff() as i64;
    let mut one_d = Vec::new();
    for k in -c..=c {
        let z = PI * k as f64 * knot_h;
        let s = if k == 0 { 1.0 } else { z.sin() / z };
        one_d.push(s.powi(order));
    }
    let idx = |k: i64| (k + c) as usize;
    let mut spec = Spectrum::zeros(grid);
    for k2 in -c..=c {
        for k1 in -c..=c {
            let mag = one_d[idx(k1)] * one_d[idx(k2)];
            let phase = -TWO_PI * 0.25 * (k1 + k2) as f64;
            *spec.coeff_mut(k1, k2) = Complex64::new(mag * phase.cos(), mag * phase.sin());
        }
    }
    let raw = fft::inverse(&spec);
    let peak = raw.sup_norm();
    raw.scaled(1.0 / peak)
}

#[test]
fn tensor_inverse_full_contract_at_128() {
    let g = Grid::new(128).unwrap();
    let psi = random_band_limited(g, 10, 7);
    let chi = random_band_limited(g, 10, 8);
    let u = VectorField {
        x: psi,
        y: chi,
    };
    let r = inv_div_tensor(&u).unwrap();
    assert!(r.trace_sup() <= 1e-12 * r.sup_norm().max(1.0));
    assert!(r.xx.mean().abs() <= 1e-12);
    assert!(r.xy.mean().abs() <= 1e-12);
    assert!(r.yy.mean().abs() <= 1e-12);
    let residual = ops::tensor_divergence(&r).sup_distance(&u);
    assert!(residual <= 1e-10 * u.sup_norm().max(1.0));
}

#[test]
fn vector_inverse_full_contract() {
    let g = Grid::new(128).unwrap();
    let f = random_band_limited(g, 12, 9);
    let v = inv_div_vector(&f).unwrap();
    assert!(ops::divergence(&v).sup_distance(&f) <= 1e-11 * f.sup_norm().max(1.0));
    assert!(ops::curl(&v).sup_norm() <= 1e-12 * ops::norm_c_vector(&v, 1).unwrap().max(1.0));
}

#[test]
fn oscillatory_reassembly_with_curved_map() {
    let g = Grid::new(256).unwrap();
    let map = gentle_map(g, 0.015);
    assert!(map.distortion() < 0.25);
    let amp = VectorField {
        x: random_band_limited(g, 3, 31).scaled(0.5),
        y: random_band_limited(g, 3, 32).scaled(0.5),
    };
    let k = (1i64, 1i64);
    let lambda = 16u32;
    let dec = osc_inverse_div(&amp, &map, k, lambda, 3).unwrap();

    let (cos_f, _) = map.carrier(k, lambda);
    let forcing = amp.pointwise_scaled(&cos_f);
    let back = dec.reassemble();
    let scale = forcing.sup_norm().max(1.0);
    assert!(
        back.sup_distance(&forcing) <= 1e-9 * scale,
        "reassembly residual {}",
        back.sup_distance(&forcing)
    );

    // Each level gains a lambda factor; measure the implied constants.
    let g0 = ops::norm_c_vector(&amp, 0).unwrap();
    let g1 = ops::norm_c_vector(&amp, 1).unwrap();
    let g2 = ops::norm_c_vector(&amp, 2).unwrap();
    let lam = lambda as f64;
    assert!(dec.stress_sup(1) <= 50.0 * g0 / lam);
    assert!(dec.stress_sup(2) <= 50.0f64.powi(2) * g1 / lam.powi(2));
    assert!(dec.stress_sup(3) <= 50.0f64.powi(3) * g2 / lam.powi(3));
    let g3 = ops::norm_c_vector(&amp, 3).unwrap();
    assert!(dec.remainder.sup_norm() <= 50.0f64.powi(3) * g3 / lam.powi(3));
}

#[test]
fn lambda_gain_halves_stress_across_ladder() {
    let g = Grid::new(256).unwrap();
    let map = gentle_map(g, 0.01);
    let amp = VectorField {
        x: random_band_limited(g, 2, 41),
        y: random_band_limited(g, 2, 42),
    };
    let sups: Vec<f64> = [16u32, 32, 64]
        .iter()
        .map(|&lambda| {
            osc_inverse_div(&amp, &map, (1, 0), lambda, 1)
                .unwrap()
                .stress_sup(1)
        })
        .collect();
    for pair in sups.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (2.0 / 1.5..=2.0 * 1.5).contains(&ratio),
            "halving ratio {ratio}"
        );
    }
}

#[test]
fn decomposition_supported_where_amplitude_is() {
    let g = Grid::new(512).unwrap();
    let bump = spline_bump(g, 0.03);
    let amp = VectorField {
        x: bump.clone(),
        y: bump.scaled(0.3),
    };
    let map = gentle_map(g, 0.012);
    let dec = osc_inverse_div(&amp, &map, (2, 1), 16, 3).unwrap();

    // Support of the bump: [0.25 - 8h, 0.25 + 8h] per axis.
    let lo = 0.25 - 8.0 * 0.03;
    let hi = 0.25 + 8.0 * 0.03;
    let outside = |i: usize| {
        let x = i as f64 / g.n() as f64;
        x < lo - 1e-9 || x > hi + 1e-9
    };
    let mut worst = 0.0f64;
    let mut check = |f: &ScalarField| {
        for i2 in 0..g.n() {
            for i1 in 0..g.n() {
                if outside(i1) || outside(i2) {
                    worst = worst.max(f.at(i1, i2).abs());
                }
            }
        }
    };
    for (_, s) in &dec.stress_terms {
        check(&s.xx);
        check(&s.xy);
        check(&s.yy);
    }
    for (_, p) in &dec.pressure_terms {
        check(p);
    }
    check(&dec.remainder.x);
    check(&dec.remainder.y);
    assert!(worst <= 1e-12, "support leakage {worst:e}");
}

#[test]
fn scalar_potential_decays_with_lambda() {
    let g = Grid::new(256).unwrap();
    let map = gentle_map(g, 0.01);
    let b = random_band_limited(g, 2, 51);
    let sups: Vec<f64> = [8u32, 16, 32]
        .iter()
        .map(|&lambda| {
            let (potential, residual) = osc_inverse_div_scalar(&b, &map, (1, 0), lambda).unwrap();
            assert!(residual <= 1e-10 * b.sup_norm().max(1.0));
            potential.sup_norm()
        })
        .collect();
    for pair in sups.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((1.0..=4.0).contains(&ratio), "decay ratio {ratio}");
    }
}

#[test]
fn interpolant_meets_budget_against_exact_summation() {
    let g = Grid::new(64).unwrap();
    let f = random_band_limited(g, 2, 61).scaled(0.3);
    let budget = 1e-9;
    let interp = Interpolant::with_budget(&f, budget).unwrap();
    let spec = fft::forward(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x1: f64 = rng.gen_range(0.0..1.0);
        let x2: f64 = rng.gen_range(0.0..1.0);
        let err = (interp.eval(x1, x2) - calculus_inverse::interp::eval_fourier(&spec, x1, x2)).abs();
        worst = worst.max(err);
    }
    assert!(worst <= budget, "worst interpolation error {worst:e}");
}

#[test]
fn complex_entry_reduces_to_real_entry() {
    let g = Grid::new(64).unwrap();
    let map = gentle_map(g, 0.01);
    let amp = VectorField {
        x: random_band_limited(g, 2, 71),
        y: random_band_limited(g, 2, 72),
    };
    let zero = VectorField::zeros(g);
    let a = osc_inverse_div(&amp, &map, (1, 1), 8, 2).unwrap();
    let b = calculus_inverse::oscdiv::osc_inverse_div_complex(&amp, &zero, &map, (1, 1), 8, 2)
        .unwrap();
    for ((_, sa), (_, sb)) in a.stress_terms.iter().zip(&b.stress_terms) {
        assert!(sa.sup_distance(sb) == 0.0);
    }
    assert!(a.remainder.sup_distance(&b.remainder) == 0.0);
}
