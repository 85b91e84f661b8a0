use maxreg_core::quad::{integrate_vec, QuadratureRule};
use maxreg_core::specfun::{
    bessel_j, gamma, hermite_function, hermite_functions, i_crossover, laguerre_functions,
    modified_bessel_i, modified_bessel_i_asymptotic, modified_bessel_i_series,
};
use proptest::prelude::*;

const N: usize = 21;

fn gram(f: impl Fn(f64) -> Option<Vec<f64>>, breaks: &[f64]) -> f64 {
    let rule = QuadratureRule::default().with_rel(1e-12).with_abs(0.0);
    let r = integrate_vec(
        |x| {
            let mut out = [0.0; N * N];
            if let Some(v) = f(x) {
                for j in 0..N {
                    for k in 0..N {
                        out[j * N + k] = v[j] * v[k];
                    }
                }
            }
            out
        },
        breaks,
        &rule,
    );
    let g = r.require("gram").unwrap();
    (0..N * N)
        .map(|p| (g[p] - if p / N == p % N { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

#[test]
fn hermite_functions_are_orthonormal() {
    let breaks: Vec<f64> = (0..=56).map(|i| -14.0 + 0.5 * i as f64).collect();
    let d = gram(|x| Some(hermite_functions(N, x)), &breaks);
    assert!(d <= 1e-10, "{d}");
}

#[test]
fn laguerre_functions_are_orthonormal() {
    let breaks: Vec<f64> = (0..=28).map(|i| 0.5 * i as f64).collect();
    for alpha in [0.3, 0.5, 1.0, 2.5] {
        let d = gram(
            |x| {
                if x > 0.0 {
                    laguerre_functions(N, alpha, x).ok()
                } else {
                    None
                }
            },
            &breaks,
        );
        assert!(d <= 1e-9, "alpha={alpha}: {d}");
    }
}

#[test]
fn modified_bessel_regimes_meet_at_the_crossover() {
    for nu in [0.0, 0.5, 1.7, 3.0] {
        let z = i_crossover(nu);
        let a = modified_bessel_i_series(nu, z).unwrap();
        let b = modified_bessel_i_asymptotic(nu, z, None).unwrap().0;
        assert!(((a - b) / b).abs() <= 1e-9, "nu={nu}");
    }
}

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let (a, b) = (gamma(x + 1.0).unwrap(), x * gamma(x).unwrap());
        prop_assert!(((a - b) / a).abs() < 1e-12);
    }

    #[test]
    fn hermite_parity(k in 0usize..60, x in -8.0f64..8.0) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (hermite_function(k, -x).unwrap(), sign * hermite_function(k, x).unwrap());
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn bessel_j_three_term_recurrence(nu in 1.0f64..6.0, x in 0.5f64..60.0) {
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} {rhs}");
    }

    #[test]
    fn modified_bessel_regime_consistency(nu in 0.0f64..3.0) {
        let z = i_crossover(nu);
        let a = modified_bessel_i_series(nu, z).unwrap();
        let b = modified_bessel_i_asymptotic(nu, z, None).unwrap().0;
        prop_assert!(((a - b) / b).abs() <= 1e-9);
    }

    #[test]
    fn evaluation_is_bitwise_deterministic(nu in 0.0f64..4.0, z in 0.0f64..80.0, k in 0usize..40) {
        prop_assert_eq!(modified_bessel_i(nu, z).unwrap().to_bits(), modified_bessel_i(nu, z).unwrap().to_bits());
        prop_assert_eq!(bessel_j(nu, z).unwrap().to_bits(), bessel_j(nu, z).unwrap().to_bits());
        prop_assert_eq!(hermite_function(k, z - 40.0).unwrap().to_bits(), hermite_function(k, z - 40.0).unwrap().to_bits());
    }

    #[test]
    fn laguerre_ground_state_is_positive(alpha in 0.05f64..4.0, x in 0.01f64..8.0) {
        prop_assert!(laguerre_functions(1, alpha, x).unwrap()[0] > 0.0);
    }
}
