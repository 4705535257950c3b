mod common;

use linbandit::{surrogate_parameter, DiscountedWls, Vector};
use proptest::prelude::*;

use common::*;

fn history(max_d: usize, max_len: usize) -> impl Strategy<Value = (usize, Vec<(Vector, f64)>)> {
    (1..=max_d).prop_flat_map(move |d| {
        (
            Just(d),
            prop::collection::vec(
                (prop::collection::vec(-1.0f64..1.0, d), -2.0f64..2.0),
                0..=max_len,
            )
            .prop_map(|raw| {
                raw.into_iter()
                    .map(|(x, y)| {
                        let v = Vector::from_vec(x);
                        let n = v.norm();
                        (if n > 1.0 { v / n } else { v }, y)
                    })
                    .collect()
            }),
        )
    })
}

fn fit(d: usize, gamma: f64, lambda: f64, h: &[(Vector, f64)]) -> DiscountedWls {
    let mut wls = DiscountedWls::new(d, gamma, lambda).unwrap();
    for (x, y) in h {
        wls.update(x, *y).unwrap();
    }
    wls
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn undiscounted_recursion_is_ridge((d, h) in history(10, 50), lambda in 1.0f64..5.0) {
        let wls = fit(d, 1.0, lambda, &h);
        let batch = batch_ridge(&h, lambda, d);
        prop_assert!((wls.theta_hat() - &batch).amax() <= 1e-8 * batch.amax().max(1.0));
    }

    #[test]
    fn rescaled_state_matches_definition(
        (d, h) in history(10, 50),
        gamma in 0.8f64..=1.0,
        lambda in 1.0f64..5.0,
    ) {
        let wls = fit(d, gamma, lambda, &h);
        let (w, wt, b) = definitional(&h, d, gamma, lambda);
        let n = h.len() as i32;
        prop_assert!(rel_err(&(wls.w() * gamma.powi(-n)), &w) <= 1e-8);
        prop_assert!(rel_err(&(wls.w_tilde() * gamma.powi(-2 * n)), &wt) <= 1e-8);
        let b_scaled = wls.b_bar() * gamma.powi(-n);
        prop_assert!((&b_scaled - &b).norm() <= 1e-8 * b.norm().max(1e-12));
        // θ̂ is the same in both parameterizations
        let direct = w.try_inverse().unwrap() * b;
        prop_assert!((wls.theta_hat() - &direct).amax() <= 1e-8 * direct.amax().max(1.0));
    }

    #[test]
    fn exploration_norm_is_scale_free(
        (d, h) in history(8, 40),
        gamma in 0.8f64..=1.0,
        probe in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let wls = fit(d, gamma, 1.0, &h);
        let x = Vector::from_iterator(d, probe.into_iter().take(d));
        let (w, wt, _) = definitional(&h, d, gamma, 1.0);
        let reference = dense_exploration_norm(&w, &wt, &x);
        let rescaled = dense_exploration_norm(wls.w(), wls.w_tilde(), &x);
        let got = wls.exploration_norm(&x).unwrap();
        prop_assert!((got - reference).abs() <= 1e-8 * reference.max(1e-12));
        prop_assert!((got - rescaled).abs() <= 1e-8 * rescaled.max(1e-12));
        prop_assert!((wls.exploration_metric().norm(&x) - got).abs() <= 1e-10 * got.max(1.0));
    }

    #[test]
    fn undiscounted_information_only_grows(
        (d, h) in history(6, 30),
        probe in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let x = Vector::from_iterator(d, probe.into_iter().take(d));
        let mut wls = DiscountedWls::new(d, 1.0, 1.0).unwrap();
        let mut last = wls.exploration_norm(&x).unwrap();
        for (a, y) in &h {
            wls.update(a, *y).unwrap();
            let now = wls.exploration_norm(&x).unwrap();
            prop_assert!(now <= last + 1e-12);
            last = now;
        }
    }

    #[test]
    fn surrogate_is_exact_on_stationary_histories(
        (d, h) in history(8, 40),
        gamma in 0.8f64..=1.0,
        lambda in 1.0f64..4.0,
        raw in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let theta = Vector::from_iterator(d, raw.into_iter().take(d));
        let pairs: Vec<(Vector, Vector)> = h.iter().map(|(x, _)| (x.clone(), theta.clone())).collect();
        let s = surrogate_parameter(&pairs, gamma, lambda, &theta).unwrap();
        prop_assert!((s - &theta).amax() <= 1e-10);
    }
}

#[test]
fn coverage_at_small_scale() {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let (d, gamma, reps, delta) = (3usize, 0.98, 200u64, 0.1);
    let mut covered = 0;
    for rep in 0..reps {
        let mut rng = linbandit::seed::stream(8, &[rep]);
        let theta = random_unit(&mut rng, d);
        let mut wls = DiscountedWls::new(d, gamma, 1.0).unwrap();
        let ok = (1..200u64).all(|k| {
            let x = random_unit(&mut rng, d);
            wls.update(&x, x.dot(&theta) + rng.sample::<f64, _>(StandardNormal))
                .unwrap();
            let beta = linbandit::tuning::beta_t(1.0, delta, d, gamma, (k + 1) as f64).unwrap();
            wls.ellipsoid_norm(&(wls.theta_hat() - &theta)).unwrap() <= beta
        });
        covered += ok as u64;
    }
    assert!(
        covered as f64 / reps as f64 >= 1.0 - delta - 0.05,
        "{covered}/{reps}"
    );
}
