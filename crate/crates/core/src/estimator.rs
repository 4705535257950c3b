//! Discounted weighted least squares.
//!
//! The state keeps the rescaled recursion
//!
//! ```text
//! W  ← γ·W  + x·xᵀ + (1−γ)·λ·I
//! W̃  ← γ²·W̃ + x·xᵀ + (1−γ²)·λ·I
//! b̄  ← γ·b̄  + x·y
//! θ̂  = W⁻¹·b̄
//! ```
//!
//! which weights observation `l` by `γ^{t−1−l}`. The textbook form with
//! weights `γ^{−l}` differs by the global factors `γ^{t−1}` (for `W`, `b̄`) and
//! `γ^{2(t−1)}` (for `W̃`); those cancel in `θ̂` and in `V_t = W·W̃⁻¹·W`, and
//! the rescaled form never overflows.

use rand::Rng;
use thiserror::Error;

use crate::numerics::{gaussian_vec, Matrix, NumericsError, SpdFactor, Vector};

/// Slack allowed on the action-norm precondition `‖x‖₂ ≤ 1`.
pub const ACTION_NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Online discounted weighted least-squares statistics.
#[derive(Debug, Clone)]
pub struct DiscountedWls {
    dim: usize,
    gamma: f64,
    lambda: f64,
    w: Matrix,
    w_tilde: Matrix,
    b_bar: Vector,
    theta_hat: Vector,
    rounds: usize,
    w_factor: SpdFactor,
    w_tilde_factor: SpdFactor,
}

impl DiscountedWls {
    /// Fresh state: `W = W̃ = λI`, `b̄ = θ̂ = 0`.
    ///
    /// Requires `d ≥ 1`, `0 < γ ≤ 1` and `λ ≥ 1`.
    pub fn new(dim: usize, gamma: f64, lambda: f64) -> Result<Self, EstimatorError> {
        if dim == 0 {
            return Err(EstimatorError::InvalidArgument(
                "dimension must be >= 1".into(),
            ));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(EstimatorError::InvalidArgument(format!(
                "discount must lie in (0, 1], got {gamma}"
            )));
        }
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(EstimatorError::InvalidArgument(format!(
                "regularization must be finite and >= 1, got {lambda}"
            )));
        }
        let w = Matrix::identity(dim, dim) * lambda;
        let w_factor = SpdFactor::new(&w)?;
        Ok(Self {
            dim,
            gamma,
            lambda,
            w_tilde: w.clone(),
            w_tilde_factor: w_factor.clone(),
            w,
            w_factor,
            b_bar: Vector::zeros(dim),
            theta_hat: Vector::zeros(dim),
            rounds: 0,
        })
    }

    /// Returns the state to its freshly initialized value.
    pub fn reset(&mut self) {
        *self = Self::new(self.dim, self.gamma, self.lambda).expect("parameters were validated");
    }

    /// Absorbs one observation `(x, y)`.
    pub fn update(&mut self, x: &Vector, y: f64) -> Result<(), EstimatorError> {
        self.check_dim(x.len())?;
        let norm = x.norm();
        if !(norm <= 1.0 + ACTION_NORM_SLACK) {
            return Err(EstimatorError::InvalidArgument(format!(
                "action norm {norm} exceeds 1"
            )));
        }
        if !y.is_finite() {
            return Err(EstimatorError::InvalidArgument(format!(
                "non-finite reward {y}"
            )));
        }
        let g = self.gamma;
        let g2 = g * g;
        let outer = x * x.transpose();

        self.w *= g;
        self.w += &outer;
        self.w_tilde *= g2;
        self.w_tilde += &outer;
        let ridge = (1.0 - g) * self.lambda;
        let ridge_tilde = (1.0 - g2) * self.lambda;
        for i in 0..self.dim {
            self.w[(i, i)] += ridge;
            self.w_tilde[(i, i)] += ridge_tilde;
        }
        self.b_bar *= g;
        self.b_bar.axpy(y, x, 1.0);

        self.w_factor = SpdFactor::new(&self.w)?;
        self.w_tilde_factor = SpdFactor::new(&self.w_tilde)?;
        self.theta_hat = self.w_factor.solve(&self.b_bar)?;
        self.rounds += 1;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of observations absorbed since the last reset.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn theta_hat(&self) -> &Vector {
        &self.theta_hat
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn w_tilde(&self) -> &Matrix {
        &self.w_tilde
    }

    pub fn b_bar(&self) -> &Vector {
        &self.b_bar
    }

    pub fn w_factor(&self) -> &SpdFactor {
        &self.w_factor
    }

    pub fn w_tilde_factor(&self) -> &SpdFactor {
        &self.w_tilde_factor
    }

    /// `‖x‖_{V_t⁻¹} = √(xᵀ·W⁻¹·W̃·W⁻¹·x)`, computed as `‖L̃ᵀ·W⁻¹·x‖₂`.
    pub fn exploration_norm(&self, x: &Vector) -> Result<f64, EstimatorError> {
        self.check_dim(x.len())?;
        let u = self.w_factor.solve(x)?;
        Ok((self.w_tilde_factor.lower().transpose() * u).norm())
    }

    /// The dense matrix `V_t⁻¹ = W⁻¹·W̃·W⁻¹`, for scoring many arms at once.
    pub fn exploration_metric(&self) -> ExplorationMetric {
        let w_inv = self.w_factor.inverse();
        let mut m = &w_inv * &self.w_tilde * &w_inv;
        // symmetrize away roundoff
        let mt = m.transpose();
        m += mt;
        m *= 0.5;
        ExplorationMetric { v_inv: m }
    }

    /// `V_t = W·W̃⁻¹·W`.
    pub fn gram(&self) -> Matrix {
        let solved = self
            .w_tilde_factor
            .solve_matrix(&self.w)
            .expect("dimensions agree");
        &self.w * solved
    }

    /// `‖v‖_{V_t}`.
    pub fn ellipsoid_norm(&self, v: &Vector) -> Result<f64, EstimatorError> {
        self.check_dim(v.len())?;
        let wv = &self.w * v;
        Ok(self.w_tilde_factor.quad_norm(&wv)?)
    }

    /// Draws `θ̃ = θ̂ + W⁻¹·L̃·Z` with `Z ∼ N(0, a²I)` and `L̃·L̃ᵀ = W̃`.
    ///
    /// The law is `N(θ̂, a²·W⁻¹W̃W⁻¹)`. Consumes exactly `d` normal draws.
    pub fn perturb_estimate<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Vector {
        let z = gaussian_vec(rng, self.dim, scale);
        if scale == 0.0 {
            return self.theta_hat.clone();
        }
        let lz = self.w_tilde_factor.lower() * z;
        let shift = self.w_factor.solve(&lz).expect("dimensions agree");
        &self.theta_hat + shift
    }

    fn check_dim(&self, got: usize) -> Result<(), EstimatorError> {
        if got == self.dim {
            Ok(())
        } else {
            Err(EstimatorError::DimensionMismatch {
                expected: self.dim,
                got,
            })
        }
    }
}

/// Precomputed `V_t⁻¹` for evaluating many exploration norms.
#[derive(Debug, Clone)]
pub struct ExplorationMetric {
    v_inv: Matrix,
}

impl ExplorationMetric {
    pub fn matrix(&self) -> &Matrix {
        &self.v_inv
    }

    /// `√(xᵀ·V_t⁻¹·x)`, clamped at zero against roundoff.
    pub fn norm(&self, x: &Vector) -> f64 {
        let q = x.dot(&(&self.v_inv * x));
        q.max(0.0).sqrt()
    }
}

/// Discounted blend of past true parameters that the confidence ellipsoid covers:
/// `W_{t,λ}⁻¹ (Σ_l γ^{−l} x_l x_lᵀ θ*_l + λ γ^{−(t−1)} θ*_t)`.
///
/// `history` holds `(x_l, θ*_l)` for `l = 1..t−1`. Evaluated in the rescaled
/// parameterization. Diagnostic only; a learner never has the `θ*_l`.
pub fn surrogate_parameter(
    history: &[(Vector, Vector)],
    gamma: f64,
    lambda: f64,
    theta_now: &Vector,
) -> Result<Vector, EstimatorError> {
    let d = theta_now.len();
    if !(gamma > 0.0 && gamma <= 1.0) || !(lambda > 0.0) {
        return Err(EstimatorError::InvalidArgument(format!(
            "need 0 < γ ≤ 1 and λ > 0, got γ={gamma}, λ={lambda}"
        )));
    }
    let mut gram = Matrix::zeros(d, d);
    let mut rhs = Vector::zeros(d);
    for (x, theta) in history {
        for got in [x.len(), theta.len()] {
            if got != d {
                return Err(EstimatorError::DimensionMismatch { expected: d, got });
            }
        }
        let xtheta = x.dot(theta);
        gram *= gamma;
        gram += x * x.transpose();
        rhs *= gamma;
        rhs.axpy(xtheta, x, 1.0);
    }
    for i in 0..d {
        gram[(i, i)] += lambda;
    }
    rhs.axpy(lambda, theta_now, 1.0);
    Ok(SpdFactor::new(&gram)?.solve(&rhs)?)
}
