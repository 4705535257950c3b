//! Shipped experiment configurations.

use crate::environment::{ArmModel, DriftSpec};
use crate::policies::{PolicyKind, RandomConfidenceSpec, UcbWidth};

use super::{AlgorithmSpec, ExperimentConfig, FeatureSource};

const DIMS: [usize; 3] = [10, 20, 50];
const ARMS: [usize; 2] = [10, 100];

/// The five algorithms of the abrupt-change comparison, discounts tuned from
/// each trace's total variation.
pub fn abrupt_lineup() -> Vec<AlgorithmSpec> {
    vec![
        AlgorithmSpec::new(PolicyKind::DLinUcb).with_ucb_width(UcbWidth::EllipsoidRadius),
        AlgorithmSpec::new(PolicyKind::DRandLinUcb)
            .with_confidence(RandomConfidenceSpec::truncated_default()),
        AlgorithmSpec::new(PolicyKind::DLinTs).with_a(1.0),
        AlgorithmSpec::new(PolicyKind::GaussianLinTs).with_a(1.0),
        AlgorithmSpec::new(PolicyKind::LinTsOracleRestart).with_a(1.0),
    ]
}

/// `T = 10000`, 60% of the coordinates flip sign at round 4000,
/// `σ² = 0.15`, `λ = 1`, 20 replications.
pub fn abrupt(d: usize, k: usize) -> ExperimentConfig {
    let name = format!("abrupt-d{d}-k{k}");
    ExperimentConfig {
        d,
        k,
        t: 10_000,
        sigma: 0.15f64.sqrt(),
        lambda: 1.0,
        drift: DriftSpec::AbruptSignFlip {
            change_round: 4_000,
            flip_fraction: 0.6,
        },
        arm_model: ArmModel::default(),
        pool_size: 10_000,
        algorithms: abrupt_lineup(),
        replications: 20,
        master_seed: 2020,
        output_path: format!("out/{name}").into(),
        feature_source: FeatureSource::Synthetic,
        redraw_drift_per_rep: true,
        parallel: true,
    }
}

/// A seconds-long run of every algorithm family, including the meta-bandit.
pub fn smoke() -> ExperimentConfig {
    let mut algorithms = abrupt_lineup();
    algorithms.push(AlgorithmSpec::new(PolicyKind::DRandLinUcb).with_bob());
    ExperimentConfig {
        d: 5,
        k: 10,
        t: 400,
        drift: DriftSpec::AbruptSignFlip {
            change_round: 160,
            flip_fraction: 0.6,
        },
        pool_size: 500,
        algorithms,
        replications: 4,
        master_seed: 7,
        output_path: "out/smoke".into(),
        ..abrupt(5, 10)
    }
}

pub fn names() -> Vec<String> {
    let mut out: Vec<String> = DIMS
        .iter()
        .flat_map(|d| ARMS.iter().map(move |k| format!("abrupt-d{d}-k{k}")))
        .collect();
    out.push("smoke".into());
    out
}

pub fn get(name: &str) -> Option<ExperimentConfig> {
    if name == "smoke" {
        return Some(smoke());
    }
    let rest = name.strip_prefix("abrupt-d")?;
    let (d, k) = rest.split_once("-k")?;
    let (d, k) = (d.parse().ok()?, k.parse().ok()?);
    (DIMS.contains(&d) && ARMS.contains(&k)).then(|| abrupt(d, k))
}
