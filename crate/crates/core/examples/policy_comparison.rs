//! Plays the randomized policies and their baselines on one shared trace.

use linbandit::environment::{generate_trace, ArmModel, DriftSpec, EnvironmentConfig, TraceSeeds};
use linbandit::policies::UcbWidth;
use linbandit::seed;
use linbandit::tuning::{optimal_gamma, RandomizedAlgorithm};
use linbandit::{LinearPolicy, Policy, PolicyConfig, RandomConfidenceSpec};

fn main() {
    let env = EnvironmentConfig {
        dim: 8,
        horizon: 3000,
        arms_per_round: 50,
        noise_sd: 0.3,
        drift: DriftSpec::AbruptSignFlip {
            change_round: 1200,
            flip_fraction: 0.6,
        },
        arm_model: ArmModel::default(),
        pool_size: 2000,
    };
    let trace = generate_trace(&env, None, TraceSeeds::from_seed(3)).unwrap();
    let choice = optimal_gamma(
        env.dim,
        trace.total_variation(),
        env.horizon as f64,
        RandomizedAlgorithm::DRandLinUcb,
    )
    .unwrap();
    println!(
        "B_T = {:.3}, γ = {:.5}, window D = {}",
        trace.total_variation(),
        choice.gamma,
        choice.window
    );

    let configs = [
        PolicyConfig::d_lin_ucb(choice.gamma, 1.0).with_ucb_width(UcbWidth::EllipsoidRadius),
        PolicyConfig::d_rand_lin_ucb(choice.gamma, RandomConfidenceSpec::truncated_default()),
        PolicyConfig::d_lin_ts(choice.gamma, 1.0),
        PolicyConfig::gaussian_lin_ts(1.0),
        PolicyConfig::lin_ts_oracle_restart(1.0),
    ];
    for (j, config) in configs.into_iter().enumerate() {
        let mut policy = LinearPolicy::new(config, env.dim, j as u64).unwrap();
        let mut noise = seed::stream(11, &[j as u64]);
        let mut regret = 0.0;
        for t in 1..=env.horizon {
            if trace.is_change_point(t) {
                policy.signal_change_point();
            }
            let actions = trace.action_set(t);
            let i = policy.select(&actions).unwrap();
            let y = trace.reward(t, &actions[i], &mut noise);
            policy.update(&actions[i], y).unwrap();
            regret += trace.best_action(t).1 - trace.expected_rewards(t)[i];
        }
        println!("{:<14} cumulative regret {regret:>9.2}", policy.name());
    }
}
