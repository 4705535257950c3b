//! Prints the closed-form tuning quantities for a few problem sizes.

use linbandit::tuning::{
    a_theory, beta_t, bob_grid, c1, c2, c3, optimal_gamma, RandomizedAlgorithm,
};

fn main() {
    let (lambda, horizon) = (1.0, 10_000.0);
    for d in [5, 16, 50] {
        let ucb = optimal_gamma(d, 1.0, horizon, RandomizedAlgorithm::DRandLinUcb).unwrap();
        let ts =
            optimal_gamma(d, 1.0, horizon, RandomizedAlgorithm::DLinTs { arms: 100.0 }).unwrap();
        let k1 = c1(lambda, d, ucb.gamma, horizon).unwrap();
        let a = a_theory(k1);
        println!("d = {d}, B_T = 1, T = 10^4");
        println!("  D-RandLinUCB: γ = {:.6}, D = {}", ucb.gamma, ucb.window);
        println!("  D-LinTS(K=100): γ = {:.6}, D = {}", ts.gamma, ts.window);
        println!(
            "  β_100(δ=0.05) = {:.4}",
            beta_t(lambda, 0.05, d, ucb.gamma, 100.0).unwrap()
        );
        println!("  c1 = {k1:.4}, a = √14·c1 = {a:.4}");
        println!(
            "  c2 = {:.4} (D-RandLinUCB), {:.4} (D-LinTS, K=100)",
            c2(a, horizon, RandomizedAlgorithm::DRandLinUcb).unwrap(),
            c2(a, horizon, RandomizedAlgorithm::DLinTs { arms: 100.0 }).unwrap()
        );
        println!("  c3 = {:.5}", c3(d, ucb.gamma, lambda, horizon).unwrap());
        let grid = bob_grid(d, horizon as u64).unwrap();
        println!(
            "  BOB: H = {}, Δ = {}, J = {:?}",
            grid.block_len, grid.steps, grid.windows
        );
    }
}
