//! Runs an experiment on arms read from a labelled feature file.
//!
//! `cargo run --example csv_features -- features.csv` reads rows of `d`
//! features followed by a 0/1 label; without an argument a small file is
//! generated first.

use std::io::Write;

use linbandit::environment::{load_features_csv, DriftSpec};
use linbandit::harness::{presets, run_experiment, FeatureSource};
use linbandit::numerics::gaussian_vec;
use linbandit::seed;

fn main() {
    let d = 6;
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let path = std::env::temp_dir().join("linbandit-features.csv");
            let mut f = std::fs::File::create(&path).unwrap();
            let mut rng = seed::stream(12, &[]);
            writeln!(f, "# f1,f2,f3,f4,f5,f6,clicked").unwrap();
            for i in 0..400 {
                let label = i % 2;
                let x =
                    gaussian_vec(&mut rng, d, 0.4).add_scalar(if label == 1 { 0.2 } else { -0.2 });
                let row: Vec<String> = x.iter().map(|v| format!("{v:.5}")).collect();
                writeln!(f, "{},{label}", row.join(",")).unwrap();
            }
            path
        }
    };
    let pools = load_features_csv(&path, d).unwrap();
    println!(
        "{}: {} unclicked, {} clicked rows",
        path.display(),
        pools.label0.len(),
        pools.label1.len()
    );

    let mut config = presets::smoke();
    config.d = d;
    config.t = 2000;
    config.drift = DriftSpec::AbruptSignFlip {
        change_round: 800,
        flip_fraction: 0.6,
    };
    config.feature_source = FeatureSource::Csv(path);
    let results = run_experiment(&config).unwrap();
    for alg in &results.algorithms {
        let s = results.final_stats(alg).unwrap();
        println!("{alg:<18} {:>9.2} ± {:.2}", s.mean, s.se);
    }
}
