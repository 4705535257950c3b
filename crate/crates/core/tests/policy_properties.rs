mod common;

use linbandit::policies::ucb_scores;
use linbandit::{
    amo, ActionSpace, LinearPolicy, Policy, PolicyConfig, RandomConfidenceSpec, Vector,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn arms(seed: u64, k: usize, d: usize) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_in_ball(&mut rng, d)).collect()
}

fn warm(policy: &mut LinearPolicy, seed: u64, rounds: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let d = policy.estimator().dim();
    let theta = random_unit(&mut rng, d);
    for r in 0..rounds {
        let a = arms(seed + r as u64, 5, d);
        let i = policy.select(&a).unwrap();
        policy.update(&a[i], a[i].dot(&theta)).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracle_path_matches_finite_selection(seed in any::<u64>(), d in 1usize..6, k in 1usize..12) {
        let mut a = LinearPolicy::new(PolicyConfig::d_lin_ts(0.95, 0.7), d, seed).unwrap();
        warm(&mut a, seed, 15);
        let mut b = a.clone();
        let set = arms(seed.wrapping_add(1), k, d);
        let chosen = a.select(&set).unwrap();
        let via_oracle = b.select_with_oracle(&ActionSpace::finite(set.clone()).unwrap()).unwrap();
        prop_assert_eq!(&via_oracle, &set[chosen]);
        prop_assert_eq!(b.counters().oracle_calls, 1);
        prop_assert_eq!(b.counters().exploration_norm_evals, 0);
    }

    #[test]
    fn unit_ball_oracle_returns_normalized_direction(seed in any::<u64>(), d in 1usize..6) {
        let mut p = LinearPolicy::new(PolicyConfig::gaussian_lin_ts(1.0), d, seed).unwrap();
        warm(&mut p, seed, 10);
        let x = p.select_with_oracle(&ActionSpace::UnitBall(d)).unwrap();
        prop_assert!((x.norm() - 1.0).abs() < 1e-12);
        let theta = p.clone().sample_parameter();
        prop_assert_eq!(amo(&ActionSpace::UnitBall(d), &theta).unwrap(), x);
    }

    #[test]
    fn ucb_choice_is_scale_invariant_in_level(seed in any::<u64>(), d in 1usize..5, level in 0.0f64..3.0) {
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ucb(0.9, level), d, seed).unwrap();
        warm(&mut p, seed, 12);
        let set = arms(seed.wrapping_add(7), 6, d);
        let scores = ucb_scores(p.estimator(), &set, level).unwrap();
        let explicit: Vec<f64> = set
            .iter()
            .map(|x| x.dot(p.estimator().theta_hat()) + level * p.estimator().exploration_norm(x).unwrap())
            .collect();
        for (s, e) in scores.iter().zip(&explicit) {
            prop_assert!((s - e).abs() <= 1e-12 * e.abs().max(1.0));
        }
    }

    #[test]
    fn discounted_kinds_at_unit_discount_are_stationary(seed in any::<u64>(), d in 1usize..5) {
        let spec = RandomConfidenceSpec::truncated_default();
        let pairs = [
            (PolicyConfig::d_lin_ts(1.0, 0.8), PolicyConfig::gaussian_lin_ts(0.8)),
            (PolicyConfig::d_rand_lin_ucb(1.0, spec), PolicyConfig::rand_lin_ucb(spec)),
            (PolicyConfig::d_lin_ucb(1.0, 0.5), PolicyConfig::lin_ucb(0.5)),
        ];
        for (disc, stat) in pairs {
            let mut a = LinearPolicy::new(disc, d, seed).unwrap();
            let mut b = LinearPolicy::new(stat, d, seed).unwrap();
            for r in 0..20u64 {
                let set = arms(seed.wrapping_add(r), 4, d);
                let i = a.select(&set).unwrap();
                prop_assert_eq!(i, b.select(&set).unwrap());
                a.update(&set[i], 0.3).unwrap();
                b.update(&set[i], 0.3).unwrap();
            }
        }
    }
}
