use maxreg_core::covering::C0;
use maxreg_core::kernels::{
    critical_radius, heat_kernel, poisson_bessel, poisson_classical, poisson_kernel, KernelSetting,
};
use maxreg_core::quad::{
    integrate_half_line_with_breaks, integrate_line_with_breaks, integrate_subordination,
    integrate_subordination_direct, QuadratureRule,
};
use maxreg_core::spectral_oracle::{
    hankel_poisson_oracle, hermite_heat_series, laguerre_poisson_series,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn settings() -> Vec<KernelSetting> {
    vec![
        KernelSetting::classical(),
        KernelSetting::hermite(),
        KernelSetting::bessel(0.7).unwrap(),
        KernelSetting::laguerre(1.3).unwrap(),
    ]
}

#[test]
fn closed_form_kernels_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in settings() {
        for _ in 0..10_000 {
            let t = rng.random_range(0.01..5.0);
            let (x, y) = if s.is_half_line() {
                (rng.random_range(0.01..6.0), rng.random_range(0.01..6.0))
            } else {
                (rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0))
            };
            assert!(
                heat_kernel(&s, t, x, y).unwrap() >= 0.0,
                "{} heat at {t} {x} {y}",
                s.name()
            );
        }
    }
    for _ in 0..10_000 {
        let t = rng.random_range(0.01..5.0);
        assert!(poisson_classical(t, rng.random_range(-10.0..10.0)).unwrap() >= 0.0);
    }
    for _ in 0..2_000 {
        let (t, x, y) = (
            rng.random_range(0.01..3.0),
            rng.random_range(0.05..4.0),
            rng.random_range(0.05..4.0),
        );
        assert!(
            poisson_bessel(1.5, t, x, y).unwrap() >= 0.0,
            "bessel poisson at {t} {x} {y}"
        );
    }
}

#[test]
fn heat_semigroup_law() {
    let rule = QuadratureRule::default().with_rel(1e-11).with_abs(0.0);
    for k in settings() {
        let pts: &[(f64, f64)] = if k.is_half_line() {
            &[(0.5, 1.0), (1.2, 0.4), (2.0, 2.5)]
        } else {
            &[(-0.7, 0.4), (0.0, 1.5), (1.2, 1.1)]
        };
        for (t, s) in [(0.2, 0.2), (0.2, 0.5), (0.5, 0.2), (0.5, 0.5)] {
            for &(x, y) in pts {
                let f =
                    |z: f64| heat_kernel(&k, t, x, z).unwrap() * heat_kernel(&k, s, z, y).unwrap();
                let r = if k.is_half_line() {
                    integrate_half_line_with_breaks(f, 0.0, &[x, y], &rule)
                } else {
                    integrate_line_with_breaks(f, &[x, y], &rule)
                };
                let direct = heat_kernel(&k, t + s, x, y).unwrap();
                let lhs = r.require("composition").unwrap();
                assert!(
                    ((lhs - direct) / direct).abs() <= 1e-6,
                    "{} t={t} s={s} x={x} y={y}",
                    k.name()
                );
            }
        }
    }
}

#[test]
fn critical_radius_is_comparable_on_neighbourhoods() {
    let mut worst = 1.0f64;
    let h = 1e-3;
    for i in 0..=20_000 {
        let x = -10.0 + i as f64 * h;
        let r = critical_radius(x);
        let steps = (r / h).floor() as i64;
        for d in [-steps, steps] {
            let y = x + d as f64 * h;
            let q = critical_radius(y) / r;
            worst = worst.max(q).max(1.0 / q);
        }
    }
    assert!(worst <= C0, "{worst}");
}

#[test]
fn series_tail_bounds_decrease_with_terms() {
    let b: Vec<f64> = [10, 20, 40, 80]
        .iter()
        .map(|&n| {
            hermite_heat_series(0.3, 0.5, -0.2, n)
                .unwrap()
                .truncation_bound
        })
        .collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]), "{b:?}");
    let b: Vec<f64> = [50, 100, 200, 400]
        .iter()
        .map(|&n| {
            laguerre_poisson_series(1.3, 1.0, 0.5, 0.9, n)
                .unwrap()
                .truncation_bound
        })
        .collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]), "{b:?}");
}

#[test]
fn hankel_round_trip_improves_under_refinement() {
    use maxreg_core::quad::Grid1D;
    let alpha = 1.5;
    let err = |n: usize| {
        let grid = Grid1D::half_line_window(8.0, n).unwrap();
        let f: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| x.powf(alpha) * (-x * x).exp())
            .collect();
        let back = hankel_poisson_oracle(alpha, 0.0, &grid, &f, 14.0).unwrap();
        f.iter()
            .zip(&back)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let e: Vec<f64> = [200, 400, 800].iter().map(|&n| err(n)).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
}

#[test]
fn substituted_and_direct_subordination_agree() {
    let rule = QuadratureRule::default().with_rel(1e-10);
    for t in [0.1, 0.7, 3.0] {
        for g in [
            |u: f64| (-u).exp(),
            |u: f64| 1.0 / (1.0 + u * u),
            |u: f64| (-(u - 1.0).powi(2)).exp(),
        ] {
            let a = integrate_subordination(g, t, &[], &rule).unwrap();
            let b = integrate_subordination_direct(g, t, &rule).unwrap();
            let tol = 10.0 * (a.error + b.error).max(1e-10 * a.value.abs());
            assert!(
                (a.value - b.value).abs() <= tol,
                "t={t}: {} vs {}",
                a.value,
                b.value
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_symmetric(t in 0.05f64..3.0, x in 0.05f64..4.0, y in 0.05f64..4.0, flip in any::<bool>()) {
        for s in settings() {
            let (x, y) = if !s.is_half_line() && flip { (-x, y) } else { (x, y) };
            let a = heat_kernel(&s, t, x, y).unwrap();
            let b = heat_kernel(&s, t, y, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
            let p = poisson_kernel(&s, t, x, y).unwrap().value;
            let q = poisson_kernel(&s, t, y, x).unwrap().value;
            prop_assert!((p - q).abs() <= 1e-9 * p.abs().max(1e-12), "{} {p} {q}", s.name());
        }
    }
}
