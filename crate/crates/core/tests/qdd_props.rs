use envqdd::linalg::{fro_norm, Op, C64, I};
use envqdd::qdd::{
    drive_propagator, ksz_closed_form, strong_rates_floquet, ksz_curve, lab_hamiltonian, strong_rates_exact, thm3_classify,
    QddStrongParams, Thm3Class, ThermalParams,
};
use envqdd::random::{instance_rng, uniform, Rand};
use proptest::prelude::*;

fn random_params(r: &mut Rand) -> QddStrongParams {
    let ks = uniform(r, 0.1, 10.0);
    let n = uniform(r, 0.0, 2.0);
    let tp = ThermalParams::new(ks / (1.0 + 2.0 * n), n).unwrap();
    QddStrongParams::thermal(
        uniform(r, 0.01, 1.0),
        uniform(r, 0.1, 5.0),
        uniform(r, 0.0, 100.0),
        uniform(r, -5.0, 5.0),
        tp,
    )
}

fn fig_grid() -> Vec<f64> {
    (0..200).map(|i| 50.0 * i as f64 / 199.0).collect()
}

/// Maxima within a few grid steps of the ends cannot be resolved by sampling.
fn resolvable(w: f64) -> bool {
    w > 1.0 && w < 45.0
}

#[test]
fn closed_form_is_non_negative() {
    for i in 0..10_000 {
        let mut r = instance_rng(7, "nonneg", i);
        let mut p = random_params(&mut r);
        // Also cover unbalanced exchange rates, including a vanishing one.
        if i % 3 == 0 {
            p.kappa_plus = 0.0;
        } else if i % 3 == 1 {
            p.kappa_minus = uniform(&mut r, 0.0, 5.0);
        }
        if p.kappa_minus + p.kappa_plus == 0.0 {
            continue;
        }
        let k = ksz_closed_form(&p);
        assert!(k >= 0.0 && k.is_finite(), "{p:?} -> {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn linear_solve_matches_closed_form(seed in any::<u64>()) {
        let mut r = instance_rng(seed, "equiv", 0);
        let p = random_params(&mut r);
        let exact = strong_rates_exact(&p).unwrap().ksz;
        let cf = ksz_closed_form(&p);
        prop_assert!((exact - cf).abs() <= 1e-10 * cf.abs().max(exact.abs()), "{exact} vs {cf}");
    }

    #[test]
    fn sampled_maximum_agrees_with_derivative_sign(n in 0.0f64..1.0, delta in 0.0f64..4.0) {
        let tp = ThermalParams::new(1.0, n).unwrap();
        let th = thm3_classify(&tp, delta).unwrap();
        let curve = ksz_curve(&QddStrongParams::thermal(1.0, 1.0, 0.0, delta, tp), &fig_grid());
        match th.omega2_max {
            None => prop_assert!(curve.max_index.is_none()),
            Some(w) if resolvable(w) => {
                let found = curve.max_location.unwrap();
                prop_assert!((found - w).abs() <= 1e-6 * w);
            }
            Some(_) => {}
        }
    }

    /// Threshold classification against the sampled curve, above and below the temperature threshold.
    #[test]
    fn sampled_maximum_agrees_with_threshold_classification(n in 0.0f64..0.3, delta in 0.0f64..4.0) {
        let tp = ThermalParams::new(1.0, n).unwrap();
        let th = thm3_classify(&tp, delta).unwrap();
        let curve = ksz_curve(&QddStrongParams::thermal(1.0, 1.0, 0.0, delta, tp), &fig_grid());
        match th.class {
            Thm3Class::MonotoneDecreasing => prop_assert!(curve.max_index.is_none()),
            Thm3Class::LocalMax => {
                let unresolvable = th.omega2_max.is_some_and(|w| !resolvable(w));
                prop_assert!(unresolvable || curve.max_index.is_some(), "n {n} delta {delta}: no sampled maximum");
            }
        }
    }

    #[test]
    fn floquet_pipeline_matches_linear_solve(seed in any::<u64>()) {
        let mut r = instance_rng(seed, "floquet-rates", 0);
        let mut p = random_params(&mut r);
        p.g = 1e-3 * p.kappa_sigma();
        let a = strong_rates_exact(&p).unwrap();
        let b = strong_rates_floquet(&p).unwrap();
        for (x, y) in [(a.ksz, b.ksz), (a.ks_minus, b.ks_minus), (a.ks_plus, b.ks_plus)] {
            prop_assert!((x - y).abs() <= 1e-8 * a.ksz.max(a.ks_minus).max(a.ks_plus), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn propagator_solves_schroedinger(seed in any::<u64>()) {
        let mut r = instance_rng(seed, "schroedinger", 0);
        let p = random_params(&mut r);
        let t = uniform(&mut r, 0.0, 20.0);
        let h = 1e-5;
        let du: Op = (drive_propagator(&p, t + h) - drive_propagator(&p, t - h)) / C64::from(2.0 * h);
        let rhs = lab_hamiltonian(&p, t) * drive_propagator(&p, t) * (-I);
        let scale = fro_norm(&lab_hamiltonian(&p, t)).max(1.0);
        prop_assert!(fro_norm(&(du - rhs)) < 1e-6 * scale);
    }
}
