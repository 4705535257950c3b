//! Lets EXP3 choose the discount when the drift budget is unknown and shows
//! which windows it settled on.

use linbandit::environment::{generate_trace, ArmModel, DriftSpec, EnvironmentConfig, TraceSeeds};
use linbandit::meta::{BobConfig, BobPolicy};
use linbandit::seed;
use linbandit::{Policy, PolicyConfig, RandomConfidenceSpec};

fn main() {
    let env = EnvironmentConfig {
        dim: 5,
        horizon: 20_000,
        arms_per_round: 20,
        noise_sd: 0.2,
        drift: DriftSpec::SmoothDrift { rate: 0.002 },
        arm_model: ArmModel::UniformBall,
        pool_size: 2000,
    };
    let trace = generate_trace(&env, None, TraceSeeds::from_seed(5)).unwrap();
    let mut bob = BobPolicy::new(BobConfig {
        dim: env.dim,
        horizon: env.horizon,
        base: PolicyConfig::d_rand_lin_ucb(0.5, RandomConfidenceSpec::truncated_default()),
        noise_sd: env.noise_sd,
        seed: 1,
    })
    .unwrap();
    println!(
        "B_T = {:.2}; block length {}, windows {:?}",
        trace.total_variation(),
        bob.block_len(),
        bob.windows()
    );

    let mut noise = seed::stream(9, &[]);
    let mut regret = 0.0;
    for t in 1..=env.horizon {
        let actions = trace.action_set(t);
        let i = bob.select(&actions).unwrap();
        let y = trace.reward(t, &actions[i], &mut noise);
        bob.update(&actions[i], y).unwrap();
        regret += trace.best_action(t).1 - trace.expected_rewards(t)[i];
    }
    println!(
        "cumulative regret {regret:.1} over {} blocks",
        bob.outcomes().len()
    );
    println!("{:>8} {:>10} {:>8}", "window", "discount", "p");
    for ((w, g), p) in bob
        .windows()
        .iter()
        .zip(bob.discounts())
        .zip(bob.exp3().probabilities())
    {
        println!("{w:>8} {g:>10.4} {p:>8.3}");
    }
}
