//! D-LinTS with an infinite action set: each round is one perturbation and
//! one call to the linear maximization oracle over the unit ball.

use linbandit::numerics::gaussian_vec;
use linbandit::seed;
use linbandit::{amo, ActionSpace, LinearPolicy, Policy, PolicyConfig, Vector};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() {
    let d = 6;
    let space = ActionSpace::UnitBall(d);
    let mut rng = seed::stream(4, &[]);
    let mut theta: Vector = gaussian_vec(&mut rng, d, 1.0).normalize();
    let mut policy = LinearPolicy::new(PolicyConfig::d_lin_ts(0.99, 0.5), d, 8).unwrap();
    let mut regret = 0.0;
    for t in 1..=5000 {
        if t == 2500 {
            theta = -theta;
        }
        let x = policy.select_with_oracle(&space).unwrap();
        let best = amo(&space, &theta).unwrap();
        regret += best.dot(&theta) - x.dot(&theta);
        let y = x.dot(&theta) + 0.1 * rng.sample::<f64, _>(StandardNormal);
        policy.update(&x, y).unwrap();
        if t % 1000 == 0 {
            println!("t = {t:>5}: cumulative regret {regret:>8.2}");
        }
    }
    let c = policy.counters();
    println!(
        "oracle calls {}, perturbations {}, exploration-norm evaluations {}",
        c.oracle_calls, c.perturbation_draws, c.exploration_norm_evals
    );
}
