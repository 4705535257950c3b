//! Runs one abrupt-change preset and prints the final regret of each algorithm.
//!
//! `cargo run --release --example abrupt_change -- abrupt-d10-k100 [reps]`

use std::time::Instant;

use linbandit::harness::{presets, run_experiment};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "abrupt-d10-k10".into());
    let mut config = presets::get(&name).unwrap_or_else(|| {
        eprintln!("unknown preset {name}; choose from {:?}", presets::names());
        std::process::exit(2);
    });
    if let Some(reps) = args.next() {
        config.replications = reps.parse().expect("replications must be an integer");
    }

    let start = Instant::now();
    let results = run_experiment(&config).expect("experiment runs");
    println!(
        "{name}: d={} K={} T={} reps={} ({:.1?})",
        config.d,
        config.k,
        config.t,
        config.replications,
        start.elapsed()
    );
    println!("{:<14} {:>12} {:>10}", "algorithm", "final regret", "se");
    for alg in &results.algorithms {
        let s = results.final_stats(alg).unwrap();
        println!("{alg:<14} {:>12.2} {:>10.2}", s.mean, s.se);
    }
    let gammas: Vec<String> = results.replications[0]
        .runs
        .iter()
        .zip(&results.algorithms)
        .filter_map(|(r, a)| r.gamma.map(|g| format!("{a}: γ={g:.5}")))
        .collect();
    println!(
        "replication 0, B_T = {:.3}; {}",
        results.replications[0].total_variation,
        gammas.join(", ")
    );
}
