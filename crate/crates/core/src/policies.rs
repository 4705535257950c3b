//! Linear bandit policies behind a common select/update interface.
//!
//! | kind                  | discount | exploration                                   |
//! |-----------------------|----------|-----------------------------------------------|
//! | `LinUcb`              | γ = 1    | fixed level `a` (or ellipsoid radius)         |
//! | `RandLinUcb`          | γ = 1    | one random level `Z_t` shared by all arms     |
//! | `GaussianLinTs`       | γ = 1    | Gaussian perturbation of the estimate         |
//! | `DLinUcb`             | γ < 1    | fixed level `a` (or ellipsoid radius)         |
//! | `DRandLinUcb`         | γ < 1    | one random level `Z_t` shared by all arms     |
//! | `DLinTs`              | γ < 1    | Gaussian perturbation, oracle access only     |
//! | `LinTsOracleRestart`  | γ = 1    | `GaussianLinTs` reset at known change points  |
//!
//! Every round's randomness comes from a stream keyed by `(seed, round)`, so
//! calling `select` twice in the same round returns the same decision.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{DiscountedWls, EstimatorError};
use crate::numerics::{argmax_lowest, Vector};
use crate::oracle::{amo, ActionSpace, OracleError};
use crate::seed;
use crate::tuning;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("action set is empty")]
    EmptyActionSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid policy configuration: {0}")]
    InvalidConfig(String),
    #[error("{0} has no oracle-only selection rule")]
    NotOracleEfficient(&'static str),
    #[error("oracle failure: {0}")]
    OracleFailure(#[from] OracleError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    LinUcb,
    GaussianLinTs,
    RandLinUcb,
    DLinUcb,
    DRandLinUcb,
    DLinTs,
    LinTsOracleRestart,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::LinUcb,
        PolicyKind::GaussianLinTs,
        PolicyKind::RandLinUcb,
        PolicyKind::DLinUcb,
        PolicyKind::DRandLinUcb,
        PolicyKind::DLinTs,
        PolicyKind::LinTsOracleRestart,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::LinUcb => "LinUCB",
            Self::GaussianLinTs => "LinTS",
            Self::RandLinUcb => "RandLinUCB",
            Self::DLinUcb => "D-LinUCB",
            Self::DRandLinUcb => "D-RandLinUCB",
            Self::DLinTs => "D-LinTS",
            Self::LinTsOracleRestart => "LinTS-OR",
        }
    }

    pub fn is_stationary(self) -> bool {
        matches!(
            self,
            Self::LinUcb | Self::GaussianLinTs | Self::RandLinUcb | Self::LinTsOracleRestart
        )
    }

    fn rule(self) -> Rule {
        match self {
            Self::LinUcb | Self::DLinUcb => Rule::Ucb,
            Self::RandLinUcb | Self::DRandLinUcb => Rule::RandomizedUcb,
            Self::GaussianLinTs | Self::DLinTs | Self::LinTsOracleRestart => Rule::Sampling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Ucb,
    RandomizedUcb,
    Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceFamily {
    Gaussian,
    /// Gaussian conditioned on `Z ≥ 0`.
    TruncatedGaussianNonneg,
}

/// Law of the random confidence level `Z_t` of randomized UCB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomConfidenceSpec {
    pub family: ConfidenceFamily,
    pub mean: f64,
    pub sd: f64,
}

impl RandomConfidenceSpec {
    /// Half-normal with scale 2/5: the level used in the drifting-environment experiments.
    pub fn truncated_default() -> Self {
        Self {
            family: ConfidenceFamily::TruncatedGaussianNonneg,
            mean: 0.0,
            sd: 0.4,
        }
    }

    pub fn gaussian(mean: f64, sd: f64) -> Self {
        Self {
            family: ConfidenceFamily::Gaussian,
            mean,
            sd,
        }
    }

    /// A point mass at `level` (sd = 0).
    pub fn constant(level: f64) -> Self {
        Self::gaussian(level, 0.0)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.sd >= 0.0) || !self.sd.is_finite() || !self.mean.is_finite() {
            return Err(PolicyError::InvalidConfig(format!(
                "confidence law needs finite mean and sd >= 0, got {self:?}"
            )));
        }
        if self.family == ConfidenceFamily::TruncatedGaussianNonneg
            && self.sd == 0.0
            && self.mean < 0.0
        {
            return Err(PolicyError::InvalidConfig(
                "truncated law with sd = 0 needs mean >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Draws one level. The truncated family uses rejection on `Z ≥ 0`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let n: f64 = rng.sample(StandardNormal);
            let z = self.mean + self.sd * n;
            match self.family {
                ConfidenceFamily::Gaussian => return z,
                ConfidenceFamily::TruncatedGaussianNonneg if z >= 0.0 => return z,
                ConfidenceFamily::TruncatedGaussianNonneg => {}
            }
        }
    }
}

/// How the deterministic UCB kinds scale the exploration bonus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UcbWidth {
    /// Bonus `a·‖x‖_{V_t⁻¹}`.
    #[default]
    Constant,
    /// Bonus `β_t(δ)·‖x‖_{V_t⁻¹}` with the weighted-least-squares ellipsoid radius.
    EllipsoidRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub lambda: f64,
    pub gamma: f64,
    /// Confidence level for UCB kinds, perturbation scale for sampling kinds.
    pub a: f64,
    /// Law of `Z_t`; only for the randomized UCB kinds.
    pub confidence: Option<RandomConfidenceSpec>,
    pub delta: f64,
    #[serde(default)]
    pub ucb_width: UcbWidth,
}

impl PolicyConfig {
    fn base(kind: PolicyKind, gamma: f64) -> Self {
        Self {
            kind,
            lambda: 1.0,
            gamma,
            a: 1.0,
            confidence: None,
            delta: 0.05,
            ucb_width: UcbWidth::Constant,
        }
    }

    pub fn lin_ucb(a: f64) -> Self {
        Self {
            a,
            ..Self::base(PolicyKind::LinUcb, 1.0)
        }
    }

    pub fn gaussian_lin_ts(a: f64) -> Self {
        Self {
            a,
            ..Self::base(PolicyKind::GaussianLinTs, 1.0)
        }
    }

    pub fn rand_lin_ucb(confidence: RandomConfidenceSpec) -> Self {
        Self {
            confidence: Some(confidence),
            ..Self::base(PolicyKind::RandLinUcb, 1.0)
        }
    }

    pub fn d_lin_ucb(gamma: f64, a: f64) -> Self {
        Self {
            a,
            ..Self::base(PolicyKind::DLinUcb, gamma)
        }
    }

    pub fn d_rand_lin_ucb(gamma: f64, confidence: RandomConfidenceSpec) -> Self {
        Self {
            confidence: Some(confidence),
            ..Self::base(PolicyKind::DRandLinUcb, gamma)
        }
    }

    pub fn d_lin_ts(gamma: f64, a: f64) -> Self {
        Self {
            a,
            ..Self::base(PolicyKind::DLinTs, gamma)
        }
    }

    pub fn lin_ts_oracle_restart(a: f64) -> Self {
        Self {
            a,
            ..Self::base(PolicyKind::LinTsOracleRestart, 1.0)
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_ucb_width(mut self, width: UcbWidth) -> Self {
        self.ucb_width = width;
        self
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        let bad = |m: String| Err(PolicyError::InvalidConfig(m));
        if !(self.lambda >= 1.0) || !self.lambda.is_finite() {
            return bad(format!("λ must be finite and >= 1, got {}", self.lambda));
        }
        if self.kind.is_stationary() {
            if self.gamma != 1.0 {
                return bad(format!(
                    "{} requires γ = 1, got {}",
                    self.kind.label(),
                    self.gamma
                ));
            }
        } else if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!(
                "{} requires γ in (0, 1], got {}",
                self.kind.label(),
                self.gamma
            ));
        }
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return bad(format!("a must be finite and >= 0, got {}", self.a));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("δ must lie in (0, 1), got {}", self.delta));
        }
        match (self.kind.rule(), &self.confidence) {
            (Rule::RandomizedUcb, Some(spec)) => spec.validate()?,
            (Rule::RandomizedUcb, None) => {
                return bad(format!("{} needs a confidence law", self.kind.label()))
            }
            (_, Some(_)) => return bad(format!("{} takes no confidence law", self.kind.label())),
            (_, None) => {}
        }
        if self.ucb_width == UcbWidth::EllipsoidRadius && self.kind.rule() != Rule::Ucb {
            return bad(format!(
                "{} has no ellipsoid-radius width",
                self.kind.label()
            ));
        }
        Ok(())
    }
}

/// Work done by a policy, for checking oracle-efficiency contracts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolicyCounters {
    pub confidence_draws: u64,
    pub perturbation_draws: u64,
    pub exploration_norm_evals: u64,
    pub inner_products: u64,
    pub oracle_calls: u64,
}

/// Uniform interface for every bandit policy.
pub trait Policy {
    fn name(&self) -> &str;

    /// Chooses an arm index from the round's action set.
    fn select(&mut self, actions: &[Vector]) -> Result<usize, PolicyError>;

    /// Feeds back the played action and its reward, ending the round.
    fn update(&mut self, action: &Vector, reward: f64) -> Result<(), PolicyError>;

    /// Tells the policy the environment changed this round. Called before
    /// `update`. Most policies ignore it.
    fn signal_change_point(&mut self) {}
}

/// `⟨x, θ̂⟩ + level·‖x‖_{V_t⁻¹}` for every arm.
pub fn ucb_scores(
    wls: &DiscountedWls,
    actions: &[Vector],
    level: f64,
) -> Result<Vec<f64>, PolicyError> {
    check_actions(wls.dim(), actions)?;
    let metric = wls.exploration_metric();
    let theta = wls.theta_hat();
    Ok(actions
        .iter()
        .map(|x| x.dot(theta) + level * metric.norm(x))
        .collect())
}

/// Index maximizing [`ucb_scores`] (lowest index on ties).
pub fn select_ucb(
    wls: &DiscountedWls,
    actions: &[Vector],
    level: f64,
) -> Result<usize, PolicyError> {
    let scores = ucb_scores(wls, actions, level)?;
    Ok(argmax_lowest(scores).expect("nonempty"))
}

fn check_actions(dim: usize, actions: &[Vector]) -> Result<(), PolicyError> {
    if actions.is_empty() {
        return Err(PolicyError::EmptyActionSet);
    }
    for x in actions {
        if x.len() != dim {
            return Err(PolicyError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
    }
    Ok(())
}

/// A single-estimator linear policy of any [`PolicyKind`].
#[derive(Debug, Clone)]
pub struct LinearPolicy {
    config: PolicyConfig,
    name: String,
    wls: DiscountedWls,
    seed: u64,
    round: u64,
    counters: PolicyCounters,
}

impl LinearPolicy {
    pub fn new(config: PolicyConfig, dim: usize, seed: u64) -> Result<Self, PolicyError> {
        config.validate()?;
        let wls = DiscountedWls::new(dim, config.gamma, config.lambda)?;
        Ok(Self {
            name: config.kind.label().to_string(),
            config,
            wls,
            seed,
            round: 0,
            counters: PolicyCounters::default(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn estimator(&self) -> &DiscountedWls {
        &self.wls
    }

    /// Number of completed rounds (`update` calls).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn counters(&self) -> PolicyCounters {
        self.counters
    }

    fn round_rng(&self) -> ChaCha8Rng {
        seed::stream(self.seed, &[self.round])
    }

    /// Confidence level used by the deterministic UCB kinds this round.
    pub fn ucb_level(&self) -> Result<f64, PolicyError> {
        match self.config.ucb_width {
            UcbWidth::Constant => Ok(self.config.a),
            UcbWidth::EllipsoidRadius => {
                let t = (self.wls.rounds() as f64).max(1.0);
                tuning::beta_t(
                    self.config.lambda,
                    self.config.delta,
                    self.wls.dim(),
                    self.config.gamma,
                    t,
                )
                .map_err(|e| PolicyError::InvalidConfig(e.to_string()))
            }
        }
    }

    /// This round's perturbed score for every arm. Draws the same randomness
    /// as `select` would.
    pub fn scores(&mut self, actions: &[Vector]) -> Result<Vec<f64>, PolicyError> {
        check_actions(self.wls.dim(), actions)?;
        let k = actions.len() as u64;
        match self.config.kind.rule() {
            Rule::Ucb => {
                let level = self.ucb_level()?;
                self.counters.exploration_norm_evals += k;
                self.counters.inner_products += k;
                ucb_scores(&self.wls, actions, level)
            }
            Rule::RandomizedUcb => {
                let spec = self.config.confidence.expect("validated");
                let z = spec.sample(&mut self.round_rng());
                self.counters.confidence_draws += 1;
                self.counters.exploration_norm_evals += k;
                self.counters.inner_products += k;
                ucb_scores(&self.wls, actions, z)
            }
            Rule::Sampling => {
                let theta = self.sample_parameter();
                self.counters.inner_products += k;
                Ok(actions.iter().map(|x| x.dot(&theta)).collect())
            }
        }
    }

    /// This round's perturbed estimate `θ̃` (sampling kinds; `θ̂` otherwise).
    pub fn sample_parameter(&mut self) -> Vector {
        if self.config.kind.rule() != Rule::Sampling {
            return self.wls.theta_hat().clone();
        }
        self.counters.perturbation_draws += 1;
        self.wls
            .perturb_estimate(&mut self.round_rng(), self.config.a)
    }

    /// Oracle-only selection for the sampling kinds: one perturbation and
    /// one call to the linear maximization oracle over `space`.
    pub fn select_with_oracle(&mut self, space: &ActionSpace) -> Result<Vector, PolicyError> {
        if self.config.kind.rule() != Rule::Sampling {
            return Err(PolicyError::NotOracleEfficient(self.config.kind.label()));
        }
        let theta = self.sample_parameter();
        self.counters.oracle_calls += 1;
        Ok(amo(space, &theta)?)
    }
}

impl Policy for LinearPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn select(&mut self, actions: &[Vector]) -> Result<usize, PolicyError> {
        let scores = self.scores(actions)?;
        Ok(argmax_lowest(scores).expect("nonempty"))
    }

    fn update(&mut self, action: &Vector, reward: f64) -> Result<(), PolicyError> {
        self.wls.update(action, reward)?;
        self.round += 1;
        Ok(())
    }

    fn signal_change_point(&mut self) {
        if self.config.kind == PolicyKind::LinTsOracleRestart {
            self.wls.reset();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gaussian_vec;
    use rand::SeedableRng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn random_arms(rng: &mut ChaCha8Rng, k: usize, d: usize) -> Vec<Vector> {
        (0..k)
            .map(|_| {
                let x = gaussian_vec(rng, d, 1.0).normalize();
                let r: f64 = rng.random();
                x * r.sqrt()
            })
            .collect()
    }

    fn train(p: &mut LinearPolicy, rng: &mut ChaCha8Rng, steps: usize) {
        let d = p.estimator().dim();
        for _ in 0..steps {
            let x = random_arms(rng, 1, d).remove(0);
            p.update(&x, rng.random::<f64>() - 0.5).unwrap();
        }
    }

    #[test]
    fn zero_level_randomized_ucb_is_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = LinearPolicy::new(
            PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::constant(0.0)),
            3,
            5,
        )
        .unwrap();
        train(&mut p, &mut rng, 30);
        let arms = random_arms(&mut rng, 12, 3);
        let greedy = argmax_lowest(arms.iter().map(|x| x.dot(p.estimator().theta_hat()))).unwrap();
        assert_eq!(p.select(&arms).unwrap(), greedy);
    }

    #[test]
    fn fresh_state_prefers_longer_arm() {
        let mut p = LinearPolicy::new(
            PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::constant(0.7)),
            2,
            0,
        )
        .unwrap();
        let arms = vec![v(&[0.5, 0.0]), v(&[1.0, 0.0])];
        assert_eq!(p.select(&arms).unwrap(), 1);
    }

    #[test]
    fn ties_pick_lowest_index() {
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ucb(0.9, 1.0), 2, 0).unwrap();
        let arms = vec![v(&[0.0, 1.0]), v(&[1.0, 0.0])];
        assert_eq!(p.select(&arms).unwrap(), 0);
    }

    #[test]
    fn empty_and_mismatched_action_sets() {
        for config in [
            PolicyConfig::d_lin_ucb(0.9, 1.0),
            PolicyConfig::d_lin_ts(0.9, 1.0),
            PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::truncated_default()),
        ] {
            let mut p = LinearPolicy::new(config, 2, 0).unwrap();
            assert_eq!(p.select(&[]), Err(PolicyError::EmptyActionSet));
            assert!(matches!(
                p.select(&[v(&[1.0])]),
                Err(PolicyError::DimensionMismatch { .. })
            ));
        }
    }

    #[test]
    fn d_lin_ucb_hand_example() {
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ucb(0.9, 1.0), 2, 0).unwrap();
        let arms = vec![v(&[1.0, 0.0]), v(&[0.0, 0.9])];
        let scores = p.scores(&arms).unwrap();
        assert!((scores[0] - 1.0).abs() < 1e-15 && (scores[1] - 0.9).abs() < 1e-15);
        assert_eq!(p.select(&arms).unwrap(), 0);
    }

    #[test]
    fn zero_scale_policies_are_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for config in [
            PolicyConfig::d_lin_ucb(0.95, 0.0),
            PolicyConfig::d_lin_ts(0.95, 0.0),
        ] {
            let mut p = LinearPolicy::new(config, 4, 9).unwrap();
            train(&mut p, &mut rng, 25);
            let arms = random_arms(&mut rng, 20, 4);
            let greedy =
                argmax_lowest(arms.iter().map(|x| x.dot(p.estimator().theta_hat()))).unwrap();
            assert_eq!(p.select(&arms).unwrap(), greedy);
        }
    }

    #[test]
    fn d_lin_ucb_equals_randomized_with_point_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ucb = LinearPolicy::new(PolicyConfig::d_lin_ucb(0.9, 0.8), 3, 1).unwrap();
        let mut rand = LinearPolicy::new(
            PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::constant(0.8)),
            3,
            2,
        )
        .unwrap();
        for _ in 0..40 {
            let arms = random_arms(&mut rng, 8, 3);
            assert_eq!(ucb.scores(&arms).unwrap(), rand.scores(&arms).unwrap());
            let i = ucb.select(&arms).unwrap();
            assert_eq!(i, rand.select(&arms).unwrap());
            let y = rng.random::<f64>();
            ucb.update(&arms[i], y).unwrap();
            rand.update(&arms[i], y).unwrap();
        }
    }

    #[test]
    fn select_is_deterministic_within_a_round() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ts(0.9, 1.0), 3, 77).unwrap();
        train(&mut p, &mut rng, 10);
        let arms = random_arms(&mut rng, 30, 3);
        let first = p.scores(&arms).unwrap();
        assert_eq!(first, p.scores(&arms).unwrap());
        let twin = p.clone().scores(&arms).unwrap();
        assert_eq!(first, twin);
    }

    #[test]
    fn sampling_uses_one_perturbation_and_no_norms() {
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ts(0.9, 1.0), 3, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let arms = random_arms(&mut rng, 17, 3);
        p.select(&arms).unwrap();
        let c = p.counters();
        assert_eq!(c.perturbation_draws, 1);
        assert_eq!(c.inner_products, 17);
        assert_eq!(c.exploration_norm_evals, 0);

        p.select_with_oracle(&ActionSpace::UnitBall(3)).unwrap();
        let c = p.counters();
        assert_eq!(
            (
                c.perturbation_draws,
                c.oracle_calls,
                c.exploration_norm_evals
            ),
            (2, 1, 0)
        );

        let mut ucb = LinearPolicy::new(PolicyConfig::d_lin_ucb(0.9, 1.0), 3, 0).unwrap();
        assert!(matches!(
            ucb.select_with_oracle(&ActionSpace::UnitBall(3)),
            Err(PolicyError::NotOracleEfficient(_))
        ));
    }

    #[test]
    fn stationary_reductions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pairs = [
            (
                PolicyConfig::d_lin_ucb(1.0, 0.7),
                PolicyConfig::lin_ucb(0.7),
            ),
            (
                PolicyConfig::d_lin_ts(1.0, 1.0),
                PolicyConfig::gaussian_lin_ts(1.0),
            ),
            (
                PolicyConfig::d_rand_lin_ucb(1.0, RandomConfidenceSpec::truncated_default()),
                PolicyConfig::rand_lin_ucb(RandomConfidenceSpec::truncated_default()),
            ),
        ];
        for (disc, stat) in pairs {
            let mut a = LinearPolicy::new(disc, 3, 13).unwrap();
            let mut b = LinearPolicy::new(stat, 3, 13).unwrap();
            for _ in 0..60 {
                let arms = random_arms(&mut rng, 10, 3);
                let i = a.select(&arms).unwrap();
                assert_eq!(i, b.select(&arms).unwrap());
                let y = rng.random::<f64>();
                a.update(&arms[i], y).unwrap();
                b.update(&arms[i], y).unwrap();
                assert!((a.estimator().w_tilde() - a.estimator().w()).abs().max() <= 1e-12);
            }
        }
    }

    #[test]
    fn update_delegates_and_counts_rounds() {
        let mut p = LinearPolicy::new(PolicyConfig::d_lin_ts(0.5, 1.0), 1, 0).unwrap();
        p.update(&v(&[1.0]), 1.0).unwrap();
        assert!((p.estimator().theta_hat()[0] - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut p = LinearPolicy::new(PolicyConfig::gaussian_lin_ts(1.0), 2, 0).unwrap();
        train(&mut p, &mut rng, 100);
        assert_eq!(p.round(), 100);
    }

    #[test]
    fn oracle_restart_resets_before_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut p = LinearPolicy::new(PolicyConfig::lin_ts_oracle_restart(1.0), 2, 0).unwrap();
        train(&mut p, &mut rng, 20);
        let x = v(&[0.6, 0.8]);
        p.signal_change_point();
        p.update(&x, 0.3).unwrap();
        let mut fresh = DiscountedWls::new(2, 1.0, 1.0).unwrap();
        fresh.update(&x, 0.3).unwrap();
        assert_eq!(p.estimator().w(), fresh.w());
        assert_eq!(p.estimator().theta_hat(), fresh.theta_hat());
        assert_eq!(p.round(), 21);

        // everyone else ignores the signal
        let mut q = LinearPolicy::new(PolicyConfig::gaussian_lin_ts(1.0), 2, 0).unwrap();
        q.update(&x, 0.3).unwrap();
        q.signal_change_point();
        assert_eq!(q.estimator().rounds(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(PolicyConfig::lin_ucb(1.0).validate().is_ok());
        let mut c = PolicyConfig::gaussian_lin_ts(1.0);
        c.gamma = 0.9;
        assert!(c.validate().is_err());
        assert!(PolicyConfig::d_lin_ts(0.0, 1.0).validate().is_err());
        assert!(PolicyConfig::d_lin_ts(0.9, -1.0).validate().is_err());
        assert!(PolicyConfig::d_lin_ts(0.9, 1.0)
            .with_lambda(0.5)
            .validate()
            .is_err());
        let mut c = PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::truncated_default());
        c.confidence = None;
        assert!(c.validate().is_err());
        let mut c = PolicyConfig::d_lin_ts(0.9, 1.0);
        c.confidence = Some(RandomConfidenceSpec::truncated_default());
        assert!(c.validate().is_err());
        assert!(PolicyConfig::d_lin_ts(0.9, 1.0)
            .with_ucb_width(UcbWidth::EllipsoidRadius)
            .validate()
            .is_err());
        let spec = RandomConfidenceSpec {
            family: ConfidenceFamily::TruncatedGaussianNonneg,
            mean: -1.0,
            sd: 0.0,
        };
        assert!(PolicyConfig::d_rand_lin_ucb(0.9, spec).validate().is_err());
    }

    #[test]
    fn truncated_confidence_is_nonnegative_half_normal() {
        let spec = RandomConfidenceSpec::truncated_default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| spec.sample(&mut rng)).collect();
        assert!(draws.iter().all(|&z| z >= 0.0));
        // half-normal mean sd·√(2/π)
        let mean = draws.iter().sum::<f64>() / n as f64;
        let expect = 0.4 * (2.0 / std::f64::consts::PI).sqrt();
        let se = 0.4 * (1.0 - 2.0 / std::f64::consts::PI).sqrt() / (n as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se);
    }

    #[test]
    fn ellipsoid_width_uses_beta() {
        let p = LinearPolicy::new(
            PolicyConfig::d_lin_ucb(0.9, 1.0)
                .with_ucb_width(UcbWidth::EllipsoidRadius)
                .with_delta(0.1),
            3,
            0,
        )
        .unwrap();
        let expect = tuning::beta_t(1.0, 0.1, 3, 0.9, 1.0).unwrap();
        assert_eq!(p.ucb_level().unwrap(), expect);
    }

    #[test]
    fn adding_constant_to_scores_keeps_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let arms = random_arms(&mut rng, 25, 4);
        let mut p = LinearPolicy::new(
            PolicyConfig::d_rand_lin_ucb(0.9, RandomConfidenceSpec::truncated_default()),
            4,
            3,
        )
        .unwrap();
        train(&mut p, &mut rng, 15);
        let scores = p.scores(&arms).unwrap();
        let i = argmax_lowest(scores.iter().copied()).unwrap();
        let shifted = argmax_lowest(scores.iter().map(|s| s + 3.25)).unwrap();
        assert_eq!(i, shifted);
        assert_eq!(i, p.select(&arms).unwrap());
    }
}
