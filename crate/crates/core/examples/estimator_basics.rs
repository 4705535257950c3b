//! Feeds a discounted least-squares estimator a drifting stream and prints
//! how fast it forgets.

use linbandit::numerics::gaussian_vec;
use linbandit::{DiscountedWls, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let d = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let before = Vector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
    let after = Vector::from_vec(vec![-0.5, 0.5, -0.5, 0.5]);

    let mut ridge = DiscountedWls::new(d, 1.0, 1.0).unwrap();
    let mut discounted = DiscountedWls::new(d, 0.97, 1.0).unwrap();
    println!(
        "{:>5} {:>12} {:>12} {:>10}",
        "t", "ridge err", "γ=0.97 err", "‖x‖ bonus"
    );
    for t in 1..=400 {
        let theta = if t <= 200 { &before } else { &after };
        let x = gaussian_vec(&mut rng, d, 1.0).normalize();
        let y = x.dot(theta) + 0.1 * rng.sample::<f64, _>(rand_distr::StandardNormal);
        ridge.update(&x, y).unwrap();
        discounted.update(&x, y).unwrap();
        if t % 50 == 0 {
            println!(
                "{t:>5} {:>12.4} {:>12.4} {:>10.4}",
                (ridge.theta_hat() - theta).norm(),
                (discounted.theta_hat() - theta).norm(),
                discounted.exploration_norm(&x).unwrap()
            );
        }
    }
}
