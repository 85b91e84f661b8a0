use maxreg_core::quad::Domain;
use maxreg_core::transference::{
    conjugation_sweep, isometry_check, ChartEntry, ChartName, SmoothBumps, ISOMETRY_STEP,
};
use proptest::prelude::*;

#[test]
fn every_entry_is_an_isometry_on_five_random_fields() {
    for entry in ChartEntry::all(0.8).unwrap() {
        for seed in 0..5 {
            let g = SmoothBumps::for_entry(&entry, seed);
            let r = isometry_check(&entry, &g, ISOMETRY_STEP).unwrap();
            assert!(
                r.defect <= 1e-8,
                "{} seed {seed}: {}",
                entry.name.label(),
                r.defect
            );
        }
    }
}

#[test]
fn every_entry_conjugates_at_second_order() {
    for entry in ChartEntry::all(0.8).unwrap() {
        let g = SmoothBumps::for_entry(&entry, 3);
        let rep = conjugation_sweep(&entry, &g, 0.01, 3).unwrap();
        assert!(
            rep.min_order() >= 1.8,
            "{}: {:?}",
            entry.name.label(),
            rep.orders
        );
        assert!(rep.levels.windows(2).all(|w| w[1].residual < w[0].residual));
    }
}

#[test]
fn transported_densities_match_the_measure_column() {
    let alpha: f64 = 0.8;
    // x^{2α}, π^{−1/2}e^{−x²}, x^{α−1/2}e^{−x}, x^{α−1/2}, x^{2α}, dx in `ChartName::ALL` order
    let expect: [fn(f64, f64) -> f64; 6] = [
        |a, y| y.powf(2.0 * a),
        |_, y| (-y * y).exp() / std::f64::consts::PI.sqrt(),
        |a, y| y.powf(a - 0.5) * (-y).exp(),
        |a, y| y.powf(a - 0.5),
        |a, y| y.powf(2.0 * a),
        |_, _| 1.0,
    ];
    for (name, density) in ChartName::ALL.into_iter().zip(expect) {
        let e = ChartEntry::new(name, alpha).unwrap();
        for i in 1..=10 {
            let y = if e.domain() == Domain::Line {
                -2.75 + 0.5 * i as f64
            } else {
                0.3 * i as f64
            };
            let (got, want) = (e.target_density(y), density(alpha, y));
            assert!(
                ((got - want) / want).abs() <= 1e-12,
                "{} at {y}: {got} vs {want}",
                name.label()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn isometry_for_random_alpha_and_seed(alpha in 0.2f64..3.0, seed in 0u64..1000, which in 0usize..6) {
        let entry = ChartEntry::new(ChartName::ALL[which], alpha).unwrap();
        let g = SmoothBumps::for_entry(&entry, seed);
        let r = isometry_check(&entry, &g, ISOMETRY_STEP).unwrap();
        prop_assert!(r.defect <= 1e-8, "{}", r.defect);
    }
}
