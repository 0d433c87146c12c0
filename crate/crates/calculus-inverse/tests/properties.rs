//! Randomized invariants for the divergence inverses.

use calculus_inverse::{inv_div_tensor, inv_div_vector, osc_inverse_div, PhaseMap};
use num_complex::Complex64;
use proptest::prelude::*;
use spectral_core::fft::{self, Spectrum};
use spectral_core::{ops, Grid, ScalarField, VectorField};

#[derive(Debug, Clone)]
struct ModeSet {
    modes: Vec<(i64, i64, f64, f64)>,
}

fn mode_set(max_mode: i64) -> impl Strategy<Value = ModeSet> {
    prop::collection::vec(
        (
            0..=max_mode,
            -max_mode..=max_mode,
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..6,
    )
    .prop_map(|modes| ModeSet { modes })
}

fn realize(grid: Grid, set: &ModeSet) -> ScalarField {
    let mut s = Spectrum::zeros(grid);
    for &(k1, k2, re, im) in &set.modes {
        if k1 == 0 && k2 <= 0 {
            continue;
        }
        let c = Complex64::new(re, im);
        *s.coeff_mut(k1, k2) += c;
        *s.coeff_mut(-k1, -k2) += c.conj();
    }
    fft::inverse(&s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tensor_inverse_is_right_inverse(a in mode_set(5), b in mode_set(5)) {
        let g = Grid::new(32).unwrap();
        let u = VectorField { x: realize(g, &a), y: realize(g, &b) };
        let r = inv_div_tensor(&u).unwrap();
        let scale = u.sup_norm().max(1.0);
        prop_assert!(r.trace_sup() <= 1e-12 * scale);
        prop_assert!(ops::tensor_divergence(&r).sup_distance(&u) <= 1e-10 * scale);
    }

    #[test]
    fn vector_inverse_is_curl_free_right_inverse(a in mode_set(5)) {
        let g = Grid::new(32).unwrap();
        let f = realize(g, &a);
        let v = inv_div_vector(&f).unwrap();
        let scale = f.sup_norm().max(1.0);
        prop_assert!(ops::divergence(&v).sup_distance(&f) <= 1e-11 * scale);
        prop_assert!(ops::curl(&v).sup_norm() <= 1e-12 * ops::norm_c_vector(&v, 1).unwrap().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oscillatory_reassembly_on_random_gentle_maps(
        a in mode_set(2),
        b in mode_set(2),
        d in mode_set(1),
        scale in 0.001f64..0.01,
    ) {
        let g = Grid::new(64).unwrap();
        let amp = VectorField { x: realize(g, &a), y: realize(g, &b) };
        let map = PhaseMap::new(VectorField {
            x: realize(g, &d).scaled(scale),
            y: realize(g, &d).scaled(-scale),
        });
        prop_assume!(map.distortion() <= 0.4);
        let dec = osc_inverse_div(&amp, &map, (1, 0), 8, 2).unwrap();
        let (cos_f, _) = map.carrier((1, 0), 8);
        let forcing = amp.pointwise_scaled(&cos_f);
        let residual = dec.reassemble().sup_distance(&forcing);
        prop_assert!(residual <= 1e-8 * forcing.sup_norm().max(1.0), "residual {residual}");
    }
}
