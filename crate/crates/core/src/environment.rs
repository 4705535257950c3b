//! Synthetic drifting linear bandit environments.
//!
//! A trace is generated once and is immutable afterwards: the parameter path
//! `θ*_1 … θ*_T`, the per-round action sets and the change-point flags. Arms
//! are drawn from a finite feature pool and stored as indices, so a trace with
//! `T = 10⁴`, `K = 100` costs a few megabytes. Reward noise is not part of the
//! trace; callers draw it from their own stream via [`EnvironmentTrace::reward`].
//!
//! Rounds are 1-based. A change at round `c` means `θ*_t` is the new
//! parameter for every `t ≥ c`, and `is_change_point(c)` is true.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{argmax_lowest, gaussian_vec, Vector};
use crate::seed;

#[derive(Debug, Error)]
pub enum EnvironmentError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: expected {expected} columns, got {got}")]
    DimensionMismatch {
        line: u64,
        expected: usize,
        got: usize,
    },
    #[error("reading features: {0}")]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> EnvironmentError {
    EnvironmentError::InvalidArgument(msg.into())
}

/// One piece of a piecewise-constant parameter path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// First round (1-based) using `theta`.
    pub start: u64,
    pub theta: Vec<f64>,
}

/// Generative rule for `θ*_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftSpec {
    /// One random unit parameter for the whole horizon.
    Stationary,
    /// A random unit parameter whose coordinates, chosen by a seeded
    /// permutation, change sign at `change_round`.
    AbruptSignFlip {
        change_round: u64,
        flip_fraction: f64,
    },
    /// Explicit segments; the first must start at round 1.
    PiecewiseList { segments: Vec<Segment> },
    /// Gaussian random walk `θ ← θ + rate·g/√d`, projected to the unit ball.
    SmoothDrift { rate: f64 },
}

impl DriftSpec {
    /// Number of coordinates an abrupt flip touches in dimension `d`.
    pub fn flipped_coordinates(flip_fraction: f64, d: usize) -> usize {
        ((flip_fraction * d as f64).round() as usize).min(d)
    }
}

/// Where per-round arms come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArmModel {
    /// Pool of points uniform in direction with uniform radius in `[0, 1]`.
    UniformBall,
    /// Two pools of Gaussian features with means `±shift·c` for a random unit
    /// `c` and per-coordinate sd `spread/√d`, each row scaled into the unit
    /// ball. Arms alternate between the pools.
    TwoPool { shift: f64, spread: f64 },
}

impl Default for ArmModel {
    fn default() -> Self {
        ArmModel::TwoPool {
            shift: 0.3,
            spread: 1.0,
        }
    }
}

/// Two labelled feature pools (label 0 and label 1).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArmPools {
    pub label0: Vec<Vector>,
    pub label1: Vec<Vector>,
}

impl ArmPools {
    pub fn dim(&self) -> Option<usize> {
        self.label0.first().or(self.label1.first()).map(|x| x.len())
    }
}

/// Shape of an environment, independent of seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConfig {
    pub dim: usize,
    pub horizon: u64,
    pub arms_per_round: usize,
    pub noise_sd: f64,
    pub drift: DriftSpec,
    pub arm_model: ArmModel,
    /// Rows per synthetic pool.
    pub pool_size: usize,
}

impl EnvironmentConfig {
    pub fn validate(&self) -> Result<(), EnvironmentError> {
        if self.dim == 0 || self.horizon == 0 || self.arms_per_round == 0 {
            return Err(invalid("d, T and K must all be >= 1"));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(invalid(format!(
                "noise sd must be >= 0, got {}",
                self.noise_sd
            )));
        }
        if self.pool_size == 0 {
            return Err(invalid("pool size must be >= 1"));
        }
        match &self.drift {
            DriftSpec::Stationary => {}
            DriftSpec::AbruptSignFlip {
                change_round,
                flip_fraction,
            } => {
                if !(0.0..=1.0).contains(flip_fraction) {
                    return Err(invalid(format!(
                        "flip fraction {flip_fraction} outside [0, 1]"
                    )));
                }
                if *change_round < 2 || *change_round > self.horizon {
                    return Err(invalid(format!(
                        "change round {change_round} outside 2..={}",
                        self.horizon
                    )));
                }
            }
            DriftSpec::PiecewiseList { segments } => {
                if segments.first().map(|s| s.start) != Some(1) {
                    return Err(invalid("first segment must start at round 1"));
                }
                for pair in segments.windows(2) {
                    if pair[1].start <= pair[0].start {
                        return Err(invalid("segment starts must be strictly increasing"));
                    }
                }
                if segments.last().unwrap().start > self.horizon {
                    return Err(invalid("segment starts beyond the horizon"));
                }
                if let Some(s) = segments.iter().find(|s| s.theta.len() != self.dim) {
                    return Err(invalid(format!(
                        "segment at round {} has {} coordinates, expected {}",
                        s.start,
                        s.theta.len(),
                        self.dim
                    )));
                }
            }
            DriftSpec::SmoothDrift { rate } => {
                if !(*rate >= 0.0) || !rate.is_finite() {
                    return Err(invalid(format!("drift rate must be >= 0, got {rate}")));
                }
            }
        }
        if let ArmModel::TwoPool { shift, spread } = self.arm_model {
            if !(shift >= 0.0 && spread >= 0.0) {
                return Err(invalid("two-pool shift and spread must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Seeds for the two independently redrawable parts of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceSeeds {
    /// Drives `θ*_t`.
    pub drift: u64,
    /// Drives pools and per-round action sets.
    pub arms: u64,
}

impl TraceSeeds {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            drift: seed::derive_seed(seed, &[1]),
            arms: seed::derive_seed(seed, &[2]),
        }
    }
}

/// An immutable realized environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentTrace {
    dim: usize,
    noise_sd: f64,
    thetas: Vec<Vector>,
    pool: Vec<Vector>,
    arms_per_round: usize,
    action_sets: Vec<u32>,
    change_flags: Vec<bool>,
    total_variation: f64,
}

fn project_to_ball(v: Vector) -> Vector {
    let n = v.norm();
    if n > 1.0 {
        v / n
    } else {
        v
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector {
    loop {
        let g = gaussian_vec(rng, d, 1.0);
        let n = g.norm();
        if n > 0.0 {
            return g / n;
        }
    }
}

/// `Σ_{t=1}^{T−1} ‖θ_t − θ_{t+1}‖₂`.
pub fn total_variation(thetas: &[Vector]) -> f64 {
    thetas.windows(2).map(|w| (&w[0] - &w[1]).norm()).sum()
}

fn parameter_path<R: Rng + ?Sized>(
    config: &EnvironmentConfig,
    rng: &mut R,
) -> (Vec<Vector>, Vec<bool>) {
    let d = config.dim;
    let t_max = config.horizon as usize;
    let mut flags = vec![false; t_max];
    let thetas = match &config.drift {
        DriftSpec::Stationary => vec![random_unit(rng, d); t_max],
        DriftSpec::AbruptSignFlip {
            change_round,
            flip_fraction,
        } => {
            let before = random_unit(rng, d);
            let mut order: Vec<usize> = (0..d).collect();
            order.shuffle(rng);
            let mut after = before.clone();
            for &i in &order[..DriftSpec::flipped_coordinates(*flip_fraction, d)] {
                after[i] = -after[i];
            }
            let c = *change_round as usize;
            flags[c - 1] = true;
            (1..=t_max)
                .map(|t| if t < c { before.clone() } else { after.clone() })
                .collect()
        }
        DriftSpec::PiecewiseList { segments } => {
            for s in &segments[1..] {
                flags[s.start as usize - 1] = true;
            }
            let mut out = Vec::with_capacity(t_max);
            for (i, s) in segments.iter().enumerate() {
                let end = segments.get(i + 1).map_or(t_max, |n| n.start as usize - 1);
                let theta = project_to_ball(Vector::from_vec(s.theta.clone()));
                out.extend(std::iter::repeat_n(theta, end + 1 - s.start as usize));
            }
            out
        }
        DriftSpec::SmoothDrift { rate } => {
            let mut cur = random_unit(rng, d);
            let step = rate / (d as f64).sqrt();
            let mut out = Vec::with_capacity(t_max);
            for _ in 0..t_max {
                out.push(cur.clone());
                cur = project_to_ball(&cur + gaussian_vec(rng, d, step));
            }
            out
        }
    };
    (thetas, flags)
}

fn synthetic_pools<R: Rng + ?Sized>(config: &EnvironmentConfig, rng: &mut R) -> ArmPools {
    let d = config.dim;
    let n = config.pool_size;
    match config.arm_model {
        ArmModel::UniformBall => {
            let pool: Vec<Vector> = (0..n)
                .map(|_| {
                    let r: f64 = rng.random();
                    random_unit(rng, d) * r
                })
                .collect();
            ArmPools {
                label0: pool.clone(),
                label1: pool,
            }
        }
        ArmModel::TwoPool { shift, spread } => {
            let center = random_unit(rng, d) * shift;
            let sd = spread / (d as f64).sqrt();
            let mut draw = |sign: f64| -> Vec<Vector> {
                (0..n)
                    .map(|_| project_to_ball(&center * sign + gaussian_vec(rng, d, sd)))
                    .collect()
            };
            let label1 = draw(1.0);
            let label0 = draw(-1.0);
            ArmPools { label0, label1 }
        }
    }
}

/// Generates a trace. With `pools = None` the arm model synthesizes them.
pub fn generate_trace(
    config: &EnvironmentConfig,
    pools: Option<&ArmPools>,
    seeds: TraceSeeds,
) -> Result<EnvironmentTrace, EnvironmentError> {
    config.validate()?;
    let mut drift_rng = seed::stream(seeds.drift, &[]);
    let mut arm_rng = seed::stream(seeds.arms, &[]);
    let (thetas, change_flags) = parameter_path(config, &mut drift_rng);

    let synthetic;
    let pools = match pools {
        Some(p) => {
            if p.label0.is_empty() || p.label1.is_empty() {
                return Err(invalid("both feature pools must be nonempty"));
            }
            if p.dim() != Some(config.dim) {
                return Err(invalid(format!(
                    "feature pools have dimension {:?}, expected {}",
                    p.dim(),
                    config.dim
                )));
            }
            p
        }
        None => {
            synthetic = synthetic_pools(config, &mut arm_rng);
            &synthetic
        }
    };
    let offset = pools.label0.len();
    let mut pool = pools.label0.clone();
    pool.extend(pools.label1.iter().cloned());
    if pool.len() > u32::MAX as usize {
        return Err(invalid("feature pool too large"));
    }

    let k = config.arms_per_round;
    let mut action_sets = Vec::with_capacity(config.horizon as usize * k);
    for _ in 0..config.horizon {
        for i in 0..k {
            let idx = if i % 2 == 0 {
                offset + arm_rng.random_range(0..pools.label1.len())
            } else {
                arm_rng.random_range(0..pools.label0.len())
            };
            action_sets.push(idx as u32);
        }
    }

    let total_variation = total_variation(&thetas);
    Ok(EnvironmentTrace {
        dim: config.dim,
        noise_sd: config.noise_sd,
        thetas,
        pool,
        arms_per_round: k,
        action_sets,
        change_flags,
        total_variation,
    })
}

impl EnvironmentTrace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> u64 {
        self.thetas.len() as u64
    }

    pub fn arms_per_round(&self) -> usize {
        self.arms_per_round
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    /// `B_T`.
    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    fn index(&self, t: u64) -> usize {
        assert!(
            t >= 1 && t <= self.horizon(),
            "round {t} outside 1..={}",
            self.horizon()
        );
        t as usize - 1
    }

    /// `θ*_t`.
    pub fn theta(&self, t: u64) -> &Vector {
        &self.thetas[self.index(t)]
    }

    pub fn thetas(&self) -> &[Vector] {
        &self.thetas
    }

    pub fn is_change_point(&self, t: u64) -> bool {
        self.change_flags[self.index(t)]
    }

    pub fn change_flags(&self) -> &[bool] {
        &self.change_flags
    }

    /// The `i`-th arm offered in round `t`.
    pub fn arm(&self, t: u64, i: usize) -> &Vector {
        let base = self.index(t) * self.arms_per_round;
        &self.pool[self.action_sets[base + i] as usize]
    }

    /// The round's action set, materialized.
    pub fn action_set(&self, t: u64) -> Vec<Vector> {
        (0..self.arms_per_round)
            .map(|i| self.arm(t, i).clone())
            .collect()
    }

    /// `⟨x, θ*_t⟩` for every arm of round `t`.
    pub fn expected_rewards(&self, t: u64) -> Vec<f64> {
        let theta = self.theta(t);
        (0..self.arms_per_round)
            .map(|i| self.arm(t, i).dot(theta))
            .collect()
    }

    /// `⟨x, θ*_t⟩ + η` with `η ∼ N(0, σ²)` from the caller's stream.
    pub fn reward<R: Rng + ?Sized>(&self, t: u64, x: &Vector, rng: &mut R) -> f64 {
        let noise: f64 = rng.sample(StandardNormal);
        x.dot(self.theta(t)) + self.noise_sd * noise
    }

    /// Best arm of round `t` and its expected reward (lowest index on ties).
    pub fn best_action(&self, t: u64) -> (usize, f64) {
        let values = self.expected_rewards(t);
        let i = argmax_lowest(values.iter().copied()).expect("K >= 1");
        (i, values[i])
    }
}

/// Reads a labelled feature file into two pools.
///
/// Each row holds `d` comma-separated reals followed by an integer label in
/// `{0, 1}`; lines starting with `#` are skipped. Rows are scaled by
/// `1/max(1, ‖x‖₂)`.
pub fn load_features_csv(path: impl AsRef<Path>, d: usize) -> Result<ArmPools, EnvironmentError> {
    let file = std::fs::File::open(path)?;
    parse_features_csv(file, d)
}

/// [`load_features_csv`] over any reader.
pub fn parse_features_csv<R: Read>(reader: R, d: usize) -> Result<ArmPools, EnvironmentError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pools = ArmPools::default();
    for record in rdr.records() {
        let record = record.map_err(|e| EnvironmentError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != d + 1 {
            return Err(EnvironmentError::DimensionMismatch {
                line,
                expected: d + 1,
                got: record.len(),
            });
        }
        let mut x = Vector::zeros(d);
        for (j, field) in record.iter().take(d).enumerate() {
            x[j] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| EnvironmentError::Parse {
                    line,
                    message: format!("column {}: not a finite number: {field:?}", j + 1),
                })?;
        }
        let x = &x / x.norm().max(1.0);
        match &record[d] {
            "0" => pools.label0.push(x),
            "1" => pools.label1.push(x),
            other => {
                return Err(EnvironmentError::Parse {
                    line,
                    message: format!("label must be 0 or 1, got {other:?}"),
                })
            }
        }
    }
    Ok(pools)
}
