//! Seeded experiment runs with per-round dynamic regret.
//!
//! Every replication draws one [`EnvironmentTrace`] that all algorithms share.
//! Algorithms advance in lockstep through the rounds, each with its own
//! reward-noise stream and policy stream keyed by
//! `(master_seed, algorithm name, replication)`, so a replication's output
//! does not depend on scheduling and parallel runs equal serial ones.

mod config;
pub mod output;
pub mod presets;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::environment::{self, ArmPools, EnvironmentTrace, TraceSeeds};
use crate::meta::{BobConfig, BobPolicy};
use crate::policies::{LinearPolicy, Policy};
use crate::seed;

pub use config::{AlgorithmSpec, ExperimentConfig, FeatureSource};

const TRACE_TAG: u64 = 0x7472_6163;
const POLICY_TAG: u64 = 0x706f_6c69;
const NOISE_TAG: u64 = 0x6e6f_6973;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// 2 for configuration problems, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// One row of the trace output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretRecord<'a> {
    pub algorithm: &'a str,
    pub replication: u32,
    pub t: u64,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

/// Per-algorithm outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    /// Discount in use; `None` for the meta-bandit.
    pub gamma: Option<f64>,
    /// `inst_regret[t-1]` for rounds `t = 1..=T`.
    pub inst_regret: Vec<f64>,
}

impl AlgorithmRun {
    /// Cumulative regret by left-to-right summation.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.inst_regret
            .iter()
            .map(|r| {
                acc += r;
                acc
            })
            .collect()
    }

    pub fn final_regret(&self) -> f64 {
        self.inst_regret.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub replication: u32,
    /// `B_T` of the shared trace.
    pub total_variation: f64,
    /// Same order as [`ResultsBundle::algorithms`].
    pub runs: Vec<AlgorithmRun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsBundle {
    pub algorithms: Vec<String>,
    pub horizon: u64,
    pub replications: Vec<ReplicationResult>,
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// `se = s/√n` with the unbiased sample deviation; 0 when `n = 1`.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        };
        Self { mean, se, n }
    }

    /// `√(se₁² + se₂²)`, the standard error of a difference of means.
    pub fn pooled_se(&self, other: &MeanSe) -> f64 {
        self.se.hypot(other.se)
    }
}

impl ResultsBundle {
    fn index_of(&self, algorithm: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == algorithm)
    }

    /// Final cumulative regret of `algorithm`, one value per replication.
    pub fn final_regrets(&self, algorithm: &str) -> Option<Vec<f64>> {
        let j = self.index_of(algorithm)?;
        Some(
            self.replications
                .iter()
                .map(|r| r.runs[j].final_regret())
                .collect(),
        )
    }

    pub fn final_stats(&self, algorithm: &str) -> Option<MeanSe> {
        self.final_regrets(algorithm).map(|v| MeanSe::of(&v))
    }

    /// Rows ordered by algorithm, replication, round.
    pub fn records(&self) -> impl Iterator<Item = RegretRecord<'_>> + '_ {
        self.algorithms
            .iter()
            .enumerate()
            .flat_map(move |(j, name)| {
                self.replications.iter().flat_map(move |rep| {
                    let mut cum = 0.0;
                    rep.runs[j]
                        .inst_regret
                        .iter()
                        .enumerate()
                        .map(move |(i, &inst)| {
                            cum += inst;
                            RegretRecord {
                                algorithm: name,
                                replication: rep.replication,
                                t: i as u64 + 1,
                                inst_regret: inst,
                                cum_regret: cum,
                            }
                        })
                })
            })
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        summarize(self.records())
    }

    /// Writes `trace.csv` and `summary.csv` into `dir`, creating it.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf), HarnessError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let trace = dir.join("trace.csv");
        let summary = dir.join("summary.csv");
        output::write_trace(BufWriter::new(File::create(&trace)?), self.records())?;
        output::write_summary(BufWriter::new(File::create(&summary)?), &self.summary())?;
        Ok((trace, summary))
    }
}

/// One row of the summary output.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub t: u64,
    pub mean_cum_regret: f64,
    pub se_cum_regret: f64,
}

/// Mean and standard error of `cum_regret` over replications for every
/// `(algorithm, t)`. Algorithms keep first-appearance order, rounds ascend.
pub fn summarize<'a>(records: impl IntoIterator<Item = RegretRecord<'a>>) -> Vec<SummaryRow> {
    let mut groups: Vec<(&str, std::collections::BTreeMap<u64, Vec<f64>>)> = Vec::new();
    for r in records {
        let pos = match groups.iter().position(|(a, _)| *a == r.algorithm) {
            Some(p) => p,
            None => {
                groups.push((r.algorithm, Default::default()));
                groups.len() - 1
            }
        };
        groups[pos].1.entry(r.t).or_default().push(r.cum_regret);
    }
    groups
        .into_iter()
        .flat_map(|(alg, by_t)| {
            by_t.into_iter().map(move |(t, values)| {
                let s = MeanSe::of(&values);
                SummaryRow {
                    algorithm: alg.to_string(),
                    t,
                    mean_cum_regret: s.mean,
                    se_cum_regret: s.se,
                }
            })
        })
        .collect()
}

/// Trace seeds of replication `rep`.
pub fn trace_seeds(config: &ExperimentConfig, rep: u32) -> TraceSeeds {
    let drift_rep = if config.redraw_drift_per_rep {
        rep as u64
    } else {
        0
    };
    TraceSeeds {
        drift: seed::derive_seed(config.master_seed, &[TRACE_TAG, 1, drift_rep]),
        arms: seed::derive_seed(config.master_seed, &[TRACE_TAG, 2, rep as u64]),
    }
}

/// The environment trace replication `rep` plays on.
pub fn replication_trace(
    config: &ExperimentConfig,
    pools: Option<&ArmPools>,
    rep: u32,
) -> Result<EnvironmentTrace, HarnessError> {
    environment::generate_trace(&config.environment(), pools, trace_seeds(config, rep))
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn load_pools(config: &ExperimentConfig) -> Result<Option<ArmPools>, HarnessError> {
    match &config.feature_source {
        FeatureSource::Synthetic => Ok(None),
        FeatureSource::Csv(path) => environment::load_features_csv(path, config.d)
            .map(Some)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display()))),
    }
}

fn build_policy(
    config: &ExperimentConfig,
    spec: &AlgorithmSpec,
    trace: &EnvironmentTrace,
    rep: u32,
) -> Result<(Box<dyn Policy>, Option<f64>), HarnessError> {
    let label = spec.label();
    let policy_seed = seed::derive_seed(
        config.master_seed,
        &[POLICY_TAG, seed::label_tag(&label), rep as u64],
    );
    let base = spec.resolve(
        config.lambda,
        config.d,
        config.k,
        config.t,
        trace.total_variation(),
    )?;
    if spec.bob {
        let bob = BobPolicy::new(BobConfig {
            dim: config.d,
            horizon: config.t,
            base,
            noise_sd: config.sigma,
            seed: policy_seed,
        })
        .map_err(|e| HarnessError::Config(format!("{label}: {e}")))?;
        Ok((Box::new(bob), None))
    } else {
        let policy = LinearPolicy::new(base, config.d, policy_seed)
            .map_err(|e| HarnessError::Config(format!("{label}: {e}")))?
            .with_name(label);
        Ok((Box::new(policy), Some(base.gamma)))
    }
}

/// Plays every algorithm of `config` on `trace` as replication `rep`.
pub fn run_replication(
    config: &ExperimentConfig,
    trace: &EnvironmentTrace,
    rep: u32,
) -> Result<ReplicationResult, HarnessError> {
    let labels = config.labels();
    let mut policies = Vec::with_capacity(config.algorithms.len());
    let mut runs = Vec::with_capacity(config.algorithms.len());
    let mut noise = Vec::with_capacity(config.algorithms.len());
    for spec in &config.algorithms {
        let (policy, gamma) = build_policy(config, spec, trace, rep)?;
        policies.push(policy);
        runs.push(AlgorithmRun {
            gamma,
            inst_regret: Vec::with_capacity(config.t as usize),
        });
        let tag = seed::label_tag(&spec.label());
        noise.push(seed::stream(
            config.master_seed,
            &[NOISE_TAG, tag, rep as u64],
        ));
    }

    for t in 1..=trace.horizon() {
        let actions = trace.action_set(t);
        let values = trace.expected_rewards(t);
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let change = trace.is_change_point(t);
        let slots = policies
            .iter_mut()
            .zip(&mut runs)
            .zip(&mut noise)
            .zip(&labels);
        for (((policy, run), rng), label) in slots {
            if change {
                policy.signal_change_point();
            }
            let runtime = |e: crate::policies::PolicyError| {
                HarnessError::Runtime(format!("{label} at round {t}: {e}"))
            };
            let i = policy.select(&actions).map_err(runtime)?;
            let y = trace.reward(t, &actions[i], rng);
            policy.update(&actions[i], y).map_err(runtime)?;
            let regret = best - values[i];
            if !regret.is_finite() {
                return Err(HarnessError::Runtime(format!(
                    "{label}: non-finite regret at round {t}"
                )));
            }
            run.inst_regret.push(regret);
        }
    }
    Ok(ReplicationResult {
        replication: rep,
        total_variation: trace.total_variation(),
        runs,
    })
}

/// Runs all replications, in parallel when `config.parallel` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsBundle, HarnessError> {
    config.validate()?;
    let pools = load_pools(config)?;
    let one = |rep: u32| -> Result<ReplicationResult, HarnessError> {
        let trace = replication_trace(config, pools.as_ref(), rep)?;
        run_replication(config, &trace, rep)
    };
    let reps: Vec<u32> = (0..config.replications).collect();
    let replications = if config.parallel {
        reps.into_par_iter()
            .map(one)
            .collect::<Result<Vec<_>, _>>()?
    } else {
        reps.into_iter().map(one).collect::<Result<Vec<_>, _>>()?
    };
    Ok(ResultsBundle {
        algorithms: config.labels(),
        horizon: config.t,
        replications,
    })
}
