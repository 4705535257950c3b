//! Bandits-over-bandits: EXP3 choosing the critical window of a discounted
//! base policy, one choice per block of `H` rounds.
//!
//! The horizon is cut into blocks of length `H`. At the start of each block
//! EXP3 picks a window `D` from the grid `J`, and a fresh base policy with
//! discount `γ = 1 − log T / D` plays the block. The block's mean reward,
//! clipped to `[−1−4σ, 1+4σ]` per round and mapped affinely onto `[0, 1]`, is
//! the bandit feedback for EXP3. Discounts are floored at
//! [`MIN_WINDOW_DISCOUNT`], which also covers windows with `D ≤ log T` that
//! have no discount in `(0, 1)`.

use rand::Rng;
use thiserror::Error;

use crate::numerics::Vector;
use crate::policies::{LinearPolicy, Policy, PolicyConfig, PolicyError, PolicyKind};
use crate::seed;
use crate::tuning::{self, BobGrid, TuningError};

/// Floor on the discount of any grid window.
pub const MIN_WINDOW_DISCOUNT: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// EXP3 with uniform mixing.
///
/// `pᵢ = (1−ε)·softmax(η·Ŝ)ᵢ + ε/N` where `Ŝ` are importance-weighted
/// cumulative gains, `ε = min(1, √(N·ln N / ((e−1)·rounds)))` and `η = ε/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3 {
    gains: Vec<f64>,
    mix: f64,
    eta: f64,
    plays: u64,
}

impl Exp3 {
    /// Tuned for `rounds` feedback rounds.
    pub fn new(arms: usize, rounds: u64) -> Result<Self, MetaError> {
        if arms == 0 {
            return Err(MetaError::InvalidArgument(
                "EXP3 needs at least one arm".into(),
            ));
        }
        let n = arms as f64;
        let rounds = rounds.max(1) as f64;
        let mix = (n * n.ln() / ((std::f64::consts::E - 1.0) * rounds))
            .sqrt()
            .min(1.0);
        Self::with_rates(arms, mix, mix / n)
    }

    pub fn with_rates(arms: usize, mix: f64, eta: f64) -> Result<Self, MetaError> {
        if arms == 0 || !(0.0..=1.0).contains(&mix) || !(eta >= 0.0) || !eta.is_finite() {
            return Err(MetaError::InvalidArgument(format!(
                "EXP3 needs arms >= 1, mix in [0, 1], eta >= 0; got {arms}, {mix}, {eta}"
            )));
        }
        Ok(Self {
            gains: vec![0.0; arms],
            mix,
            eta,
            plays: 0,
        })
    }

    pub fn arms(&self) -> usize {
        self.gains.len()
    }

    pub fn mix(&self) -> f64 {
        self.mix
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn plays(&self) -> u64 {
        self.plays
    }

    /// Unnormalized weights `exp(η·(Ŝᵢ − max Ŝ))`, all in `(0, 1]`.
    pub fn weights(&self) -> Vec<f64> {
        let top = self.gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.gains
            .iter()
            .map(|g| (self.eta * (g - top)).exp())
            .collect()
    }

    /// Sampling distribution over arms.
    pub fn probabilities(&self) -> Vec<f64> {
        let w = self.weights();
        let total: f64 = w.iter().sum();
        let n = self.gains.len() as f64;
        w.iter()
            .map(|wi| (1.0 - self.mix) * wi / total + self.mix / n)
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let p = self.probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, pi) in p.iter().enumerate() {
            acc += pi;
            if u < acc {
                return i;
            }
        }
        p.len() - 1
    }

    /// Importance-weighted update for the played arm with reward in `[0, 1]`.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<(), MetaError> {
        if arm >= self.gains.len() {
            return Err(MetaError::InvalidArgument(format!(
                "arm {arm} out of range"
            )));
        }
        if !(0.0..=1.0).contains(&reward) {
            return Err(MetaError::InvalidArgument(format!(
                "reward {reward} outside [0, 1]"
            )));
        }
        let p = self.probabilities()[arm];
        self.gains[arm] += reward / p;
        self.plays += 1;
        Ok(())
    }
}

/// `r̂ⱼ = 1{j = arm}·reward / pⱼ`.
pub fn importance_weighted_estimate(arm: usize, reward: f64, probs: &[f64]) -> Vec<f64> {
    (0..probs.len())
        .map(|j| if j == arm { reward / probs[j] } else { 0.0 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BobConfig {
    pub dim: usize,
    pub horizon: u64,
    /// Base policy; its `gamma` is replaced every block.
    pub base: PolicyConfig,
    /// Noise level used for reward clipping.
    pub noise_sd: f64,
    pub seed: u64,
}

/// Feedback of one finished block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOutcome {
    pub block: u64,
    pub grid_index: usize,
    pub window: u64,
    pub normalized_reward: f64,
}

/// A base policy restarted every block with an EXP3-chosen window.
#[derive(Debug, Clone)]
pub struct BobPolicy {
    config: BobConfig,
    name: String,
    block_len: u64,
    windows: Vec<u64>,
    discounts: Vec<f64>,
    exp3: Exp3,
    base: LinearPolicy,
    block: u64,
    choice: usize,
    block_rounds: u64,
    block_reward: f64,
    reward_range: (f64, f64),
    outcomes: Vec<BlockOutcome>,
}

impl BobPolicy {
    /// Grid and block length from [`tuning::bob_grid`].
    pub fn new(config: BobConfig) -> Result<Self, MetaError> {
        let BobGrid {
            block_len, windows, ..
        } = tuning::bob_grid(config.dim, config.horizon)?;
        Self::with_grid(config, windows, block_len)
    }

    /// Explicit grid and block length.
    pub fn with_grid(
        config: BobConfig,
        windows: Vec<u64>,
        block_len: u64,
    ) -> Result<Self, MetaError> {
        if !matches!(
            config.base.kind,
            PolicyKind::DRandLinUcb | PolicyKind::DLinTs | PolicyKind::DLinUcb
        ) {
            return Err(MetaError::InvalidArgument(format!(
                "{} is not a discounted base policy",
                config.base.kind.label()
            )));
        }
        if windows.is_empty() || block_len == 0 || windows.contains(&0) {
            return Err(MetaError::InvalidArgument(
                "grid must be nonempty with positive windows and block length".into(),
            ));
        }
        if !(config.noise_sd >= 0.0) {
            return Err(MetaError::InvalidArgument("noise sd must be >= 0".into()));
        }
        let discounts: Vec<f64> = windows
            .iter()
            .map(|&w| {
                tuning::discount_for_window(w, config.horizon)
                    .map_or(MIN_WINDOW_DISCOUNT, |g| g.max(MIN_WINDOW_DISCOUNT))
            })
            .collect();
        let blocks = config.horizon.div_ceil(block_len);
        let exp3 = Exp3::new(windows.len(), blocks)?;
        let spread = 1.0 + 4.0 * config.noise_sd;
        let name = format!("BOB-{}", config.base.kind.label());
        let mut bob = Self {
            base: LinearPolicy::new(
                PolicyConfig {
                    gamma: discounts[0],
                    ..config.base
                },
                config.dim,
                0,
            )?,
            config,
            name,
            block_len,
            windows,
            discounts,
            exp3,
            block: 0,
            choice: 0,
            block_rounds: 0,
            block_reward: 0.0,
            reward_range: (-spread, spread),
            outcomes: Vec::new(),
        };
        bob.start_block()?;
        Ok(bob)
    }

    fn start_block(&mut self) -> Result<(), MetaError> {
        let mut rng = seed::stream(self.config.seed, &[0, self.block]);
        self.choice = self.exp3.sample(&mut rng);
        let base = PolicyConfig {
            gamma: self.discounts[self.choice],
            ..self.config.base
        };
        let policy_seed = seed::derive_seed(self.config.seed, &[1, self.block]);
        self.base = LinearPolicy::new(base, self.config.dim, policy_seed)?;
        self.block_rounds = 0;
        self.block_reward = 0.0;
        Ok(())
    }

    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    pub fn windows(&self) -> &[u64] {
        &self.windows
    }

    pub fn discounts(&self) -> &[f64] {
        &self.discounts
    }

    pub fn exp3(&self) -> &Exp3 {
        &self.exp3
    }

    /// Zero-based index of the running block.
    pub fn block(&self) -> u64 {
        self.block
    }

    pub fn current_window(&self) -> u64 {
        self.windows[self.choice]
    }

    pub fn current_grid_index(&self) -> usize {
        self.choice
    }

    pub fn base(&self) -> &LinearPolicy {
        &self.base
    }

    pub fn outcomes(&self) -> &[BlockOutcome] {
        &self.outcomes
    }

    /// Maps a block's mean clipped reward onto `[0, 1]`.
    pub fn normalize_block_reward(&self, mean_reward: f64) -> f64 {
        let (lo, hi) = self.reward_range;
        ((mean_reward - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// One full round: select, observe via `reward_of`, update.
    pub fn step(
        &mut self,
        actions: &[Vector],
        mut reward_of: impl FnMut(usize) -> f64,
    ) -> Result<usize, MetaError> {
        let i = self.select(actions)?;
        let y = reward_of(i);
        self.update(&actions[i], y)?;
        Ok(i)
    }

    fn close_block(&mut self) -> Result<(), MetaError> {
        let mean = self.block_reward / self.block_rounds as f64;
        let normalized = self.normalize_block_reward(mean);
        self.exp3.update(self.choice, normalized)?;
        self.outcomes.push(BlockOutcome {
            block: self.block,
            grid_index: self.choice,
            window: self.windows[self.choice],
            normalized_reward: normalized,
        });
        self.block += 1;
        self.start_block()
    }
}

impl Policy for BobPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn select(&mut self, actions: &[Vector]) -> Result<usize, PolicyError> {
        self.base.select(actions)
    }

    fn update(&mut self, action: &Vector, reward: f64) -> Result<(), PolicyError> {
        self.base.update(action, reward)?;
        let (lo, hi) = self.reward_range;
        self.block_reward += reward.clamp(lo, hi);
        self.block_rounds += 1;
        if self.block_rounds == self.block_len {
            self.close_block().map_err(|e| match e {
                MetaError::Policy(p) => p,
                other => PolicyError::InvalidConfig(other.to_string()),
            })?;
        }
        Ok(())
    }
}
