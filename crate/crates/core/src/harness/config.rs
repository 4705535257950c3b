//! Experiment configuration as read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::{ArmModel, DriftSpec, EnvironmentConfig};
use crate::meta::BobPolicy;
use crate::policies::{PolicyConfig, PolicyKind, RandomConfidenceSpec, UcbWidth};
use crate::tuning::{self, RandomizedAlgorithm};

use super::HarnessError;

fn default_a() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

fn default_pool_size() -> usize {
    10_000
}

/// Where arm features come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    /// Pools drawn from the configured [`ArmModel`].
    #[default]
    Synthetic,
    /// Labelled feature file, see [`crate::environment::load_features_csv`].
    Csv(PathBuf),
}

/// One competitor in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    /// Column value in the output; defaults to the kind's label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: PolicyKind,
    /// Discount. Omitted: 1 for stationary kinds, tuned from the trace's
    /// total variation for discounted kinds. Must be omitted with `bob`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_a")]
    pub a: f64,
    /// Law of the confidence level for the randomized UCB kinds; defaults to
    /// the nonnegative truncated normal with sd 0.4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<RandomConfidenceSpec>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub ucb_width: UcbWidth,
    /// Wrap the policy in the EXP3 window selector.
    #[serde(default)]
    pub bob: bool,
}

impl AlgorithmSpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            name: None,
            kind,
            gamma: None,
            a: default_a(),
            confidence: None,
            delta: default_delta(),
            ucb_width: UcbWidth::Constant,
            bob: false,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_confidence(mut self, spec: RandomConfidenceSpec) -> Self {
        self.confidence = Some(spec);
        self
    }

    pub fn with_ucb_width(mut self, width: UcbWidth) -> Self {
        self.ucb_width = width;
        self
    }

    pub fn with_bob(mut self) -> Self {
        self.bob = true;
        self
    }

    pub fn label(&self) -> String {
        match (&self.name, self.bob) {
            (Some(n), _) => n.clone(),
            (None, true) => format!("BOB-{}", self.kind.label()),
            (None, false) => self.kind.label().to_string(),
        }
    }

    fn confidence_law(&self) -> Option<RandomConfidenceSpec> {
        match self.kind {
            PolicyKind::RandLinUcb | PolicyKind::DRandLinUcb => Some(
                self.confidence
                    .unwrap_or_else(RandomConfidenceSpec::truncated_default),
            ),
            _ => self.confidence,
        }
    }

    /// Policy configuration with the discount resolved against a trace with
    /// total variation `variation`.
    pub fn resolve(
        &self,
        lambda: f64,
        d: usize,
        k: usize,
        horizon: u64,
        variation: f64,
    ) -> Result<PolicyConfig, HarnessError> {
        let gamma = match self.gamma {
            Some(g) => g,
            None if self.kind.is_stationary() || self.bob => 1.0,
            None if variation == 0.0 => 1.0,
            None => {
                let alg = match self.kind {
                    PolicyKind::DLinTs => RandomizedAlgorithm::DLinTs { arms: k as f64 },
                    _ => RandomizedAlgorithm::DRandLinUcb,
                };
                tuning::optimal_gamma(d, variation, horizon as f64, alg)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", self.label())))?
                    .gamma
            }
        };
        let config = PolicyConfig {
            kind: self.kind,
            lambda,
            gamma,
            a: self.a,
            confidence: self.confidence_law(),
            delta: self.delta,
            ucb_width: self.ucb_width,
        };
        config
            .validate()
            .map_err(|e| HarnessError::Config(format!("{}: {e}", self.label())))?;
        Ok(config)
    }
}

/// A full experiment. Field names are the JSON keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    /// Arms per round.
    pub k: usize,
    /// Horizon.
    pub t: u64,
    /// Noise standard deviation.
    pub sigma: f64,
    pub lambda: f64,
    pub drift: DriftSpec,
    #[serde(default)]
    pub arm_model: ArmModel,
    /// Rows per synthetic pool.
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    pub replications: u32,
    pub master_seed: u64,
    /// Output directory for `trace.csv` and `summary.csv`.
    pub output_path: PathBuf,
    #[serde(default)]
    pub feature_source: FeatureSource,
    /// Draw a fresh parameter path per replication; otherwise only the
    /// action sets change between replications.
    #[serde(default = "default_true")]
    pub redraw_drift_per_rep: bool,
    /// Run replications on the rayon pool.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn environment(&self) -> EnvironmentConfig {
        EnvironmentConfig {
            dim: self.d,
            horizon: self.t,
            arms_per_round: self.k,
            noise_sd: self.sigma,
            drift: self.drift.clone(),
            arm_model: self.arm_model.clone(),
            pool_size: self.pool_size,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.algorithms.iter().map(AlgorithmSpec::label).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.replications == 0 {
            return bad("replications must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        self.environment()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let labels = self.labels();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return bad(format!("duplicate algorithm name {l:?}"));
            }
        }
        for spec in &self.algorithms {
            if spec.bob {
                if spec.gamma.is_some() {
                    return bad(format!(
                        "{}: gamma is chosen by the meta-bandit",
                        spec.label()
                    ));
                }
                let mut probe = spec.resolve(self.lambda, self.d, self.k, self.t, 0.0)?;
                probe.gamma = 0.5;
                BobPolicy::new(crate::meta::BobConfig {
                    dim: self.d,
                    horizon: self.t,
                    base: probe,
                    noise_sd: self.sigma,
                    seed: 0,
                })
                .map_err(|e| HarnessError::Config(format!("{}: {e}", spec.label())))?;
            } else {
                spec.resolve(self.lambda, self.d, self.k, self.t, 0.0)?;
            }
        }
        Ok(())
    }
}
