//! Closed-form tuning constants.
//!
//! `log` is the natural logarithm everywhere. Horizons and arm counts are
//! taken as `f64` because several of the formulas are used at non-integer
//! arguments (e.g. `T/2 = e`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuningError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("drift rate {rate} >= 1: the closed-form discount leaves (0, 1)")]
    InvalidRegime { rate: f64 },
}

/// The two randomized discounted policies whose constants differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomizedAlgorithm {
    /// One shared confidence draw per round.
    DRandLinUcb,
    /// One parameter perturbation per round; constants depend on the arm count.
    DLinTs { arms: f64 },
}

fn invalid(msg: impl Into<String>) -> TuningError {
    TuningError::InvalidArgument(msg.into())
}

/// `(1 − γ^{2t}) / (1 − γ²)`, evaluated stably; the limit `t` at `γ = 1`.
fn discounted_count(gamma: f64, t: f64) -> f64 {
    if gamma == 1.0 {
        return t;
    }
    let lg = gamma.ln();
    (2.0 * t * lg).exp_m1() / (2.0 * lg).exp_m1()
}

/// Confidence-ellipsoid radius for the weighted least-squares estimate:
/// `β_t = √λ + √(2·log(1/δ) + d·log(1 + (1−γ^{2t})/(λ·d·(1−γ²))))`.
///
/// Accepts `γ = 1`, where the ratio takes its limit `t` (the ridge radius).
pub fn beta_t(lambda: f64, delta: f64, d: usize, gamma: f64, t: f64) -> Result<f64, TuningError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("λ must be positive, got {lambda}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("δ must lie in (0, 1), got {delta}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid(format!("γ must lie in (0, 1], got {gamma}")));
    }
    if !(t >= 1.0) || d == 0 {
        return Err(invalid(format!("need t >= 1 and d >= 1, got t={t}, d={d}")));
    }
    let df = d as f64;
    let inner =
        2.0 * (1.0 / delta).ln() + df * (1.0 + discounted_count(gamma, t) / (lambda * df)).ln();
    Ok(lambda.sqrt() + inner.sqrt())
}

/// Radius under which the estimation event holds for all rounds with
/// probability `1 − 1/T`:
/// `c₁ = √(2·log T + d·log(1 + (1−γ^{2(T−1)})/(λ·d·(1−γ²)))) + √λ`.
pub fn c1(lambda: f64, d: usize, gamma: f64, horizon: f64) -> Result<f64, TuningError> {
    if !(horizon >= 2.0) {
        return Err(invalid(format!("T must be >= 2, got {horizon}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("γ must lie in (0, 1), got {gamma}")));
    }
    if !(lambda >= 1.0) || d == 0 {
        return Err(invalid(format!(
            "need λ >= 1 and d >= 1, got λ={lambda}, d={d}"
        )));
    }
    let df = d as f64;
    let ratio = (1.0 - gamma.powf(2.0 * (horizon - 1.0))) / (lambda * df * (1.0 - gamma * gamma));
    Ok((2.0 * horizon.ln() + df * (1.0 + ratio).ln()).sqrt() + lambda.sqrt())
}

/// Concentration radius of the perturbation:
/// `a·√(2·log(T/2))` for D-RandLinUCB, `a·√(2·log(K·T/2))` for D-LinTS.
pub fn c2(a: f64, horizon: f64, algorithm: RandomizedAlgorithm) -> Result<f64, TuningError> {
    if !(horizon >= 3.0) {
        return Err(invalid(format!("T must be >= 3, got {horizon}")));
    }
    if !(a >= 0.0) {
        return Err(invalid(format!("a must be >= 0, got {a}")));
    }
    let arms = match algorithm {
        RandomizedAlgorithm::DRandLinUcb => 1.0,
        RandomizedAlgorithm::DLinTs { arms } if arms >= 1.0 => arms,
        RandomizedAlgorithm::DLinTs { arms } => {
            return Err(invalid(format!("K must be >= 1, got {arms}")))
        }
    };
    Ok(a * (2.0 * (arms * horizon / 2.0).ln()).sqrt())
}

/// Perturbation scale giving constant anti-concentration: `a = √14·c₁`.
pub fn a_theory(c1: f64) -> f64 {
    14f64.sqrt() * c1
}

/// Elliptical-potential constant:
/// `c₃ = 2d·log(1/γ) + (2d/T)·log(1 + 1/(d·λ·(1−γ)))`.
pub fn c3(d: usize, gamma: f64, lambda: f64, horizon: f64) -> Result<f64, TuningError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("γ must lie in (0, 1), got {gamma}")));
    }
    if !(lambda > 0.0) || !(horizon > 0.0) || d == 0 {
        return Err(invalid("need λ > 0, T > 0 and d >= 1"));
    }
    let df = d as f64;
    Ok(2.0 * df * (1.0 / gamma).ln()
        + 2.0 * df / horizon * (1.0 + 1.0 / (df * lambda * (1.0 - gamma))).ln())
}

/// Discount and critical window tuned for a known drift budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountChoice {
    pub gamma: f64,
    /// Critical window `⌈log T / (1 − γ)⌉`.
    pub window: u64,
}

/// `γ = 1 − d^{−1/4}·B_T^{1/2}·T^{−1/2}` (times `(log K)^{−1/4}` in the drift
/// rate for D-LinTS) and `D = ⌈log T/(1−γ)⌉`.
pub fn optimal_gamma(
    d: usize,
    variation: f64,
    horizon: f64,
    algorithm: RandomizedAlgorithm,
) -> Result<DiscountChoice, TuningError> {
    if !(variation > 0.0) || !variation.is_finite() {
        return Err(invalid(format!(
            "total variation must be positive (use γ = 1 when it is zero), got {variation}"
        )));
    }
    if !(horizon >= 2.0) || d == 0 {
        return Err(invalid(format!(
            "need T >= 2 and d >= 1, got T={horizon}, d={d}"
        )));
    }
    let mut rate = (d as f64).powf(-0.25) * variation.sqrt() / horizon.sqrt();
    if let RandomizedAlgorithm::DLinTs { arms } = algorithm {
        if !(arms > 1.0) {
            return Err(invalid(format!("D-LinTS tuning needs K > 1, got {arms}")));
        }
        rate *= arms.ln().powf(-0.25);
    }
    if rate >= 1.0 {
        return Err(TuningError::InvalidRegime { rate });
    }
    // from the rate directly: 1 − (1 − rate) loses bits
    let window = ceil_robust(horizon.ln() / rate) as u64;
    Ok(DiscountChoice {
        gamma: 1.0 - rate,
        window,
    })
}

/// Block length, grid exponent count and window grid of the meta-bandit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobGrid {
    /// `H = ⌈d^{1/4}·T^{1/2}⌉`
    pub block_len: u64,
    /// `Δ = ⌈log H⌉`
    pub steps: u64,
    /// Sorted, deduplicated `{round(H^{k/Δ}) : k = 0..Δ}`.
    pub windows: Vec<u64>,
}

/// Grid of candidate critical windows for the meta-bandit.
pub fn bob_grid(d: usize, horizon: u64) -> Result<BobGrid, TuningError> {
    if horizon < 4 || d == 0 {
        return Err(invalid(format!(
            "need T >= 4 and d >= 1, got T={horizon}, d={d}"
        )));
    }
    let h = ceil_robust((d as f64).powf(0.25) * (horizon as f64).sqrt()).max(1.0);
    let steps = ceil_robust(h.ln()).max(1.0) as u64;
    let block_len = h as u64;
    let mut windows: Vec<u64> = (0..=steps)
        .map(|k| {
            let v = h.powf(k as f64 / steps as f64).round().max(1.0);
            (v as u64).min(block_len)
        })
        .collect();
    windows.sort_unstable();
    windows.dedup();
    Ok(BobGrid {
        block_len,
        steps,
        windows,
    })
}

/// Discount whose critical window `log T/(1−γ)` equals `window`:
/// `γ = 1 − log T / D`. `None` when `D ≤ log T` (no discount in `(0, 1)`).
pub fn discount_for_window(window: u64, horizon: u64) -> Option<f64> {
    let gamma = 1.0 - (horizon as f64).ln() / window as f64;
    (gamma > 0.0 && gamma < 1.0).then_some(gamma)
}

/// Critical window `⌈log T/(1−γ)⌉` of a discount.
pub fn window_for_discount(gamma: f64, horizon: u64) -> Result<u64, TuningError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("γ must lie in (0, 1), got {gamma}")));
    }
    Ok(ceil_robust((horizon as f64).ln() / (1.0 - gamma)) as u64)
}

/// Ceiling that ignores floating-point dust just above an integer.
fn ceil_robust(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}
