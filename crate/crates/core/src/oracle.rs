//! Offline linear maximization oracle: `argmax_{x ∈ 𝒳} ⟨x, θ⟩`.

use thiserror::Error;

use crate::numerics::{argmax_lowest, Vector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("action set is empty")]
    EmptyActionSet,
    #[error("action {index} has norm {norm} > 1")]
    ActionOutsideBall { index: usize, norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Action space handed to the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSpace {
    /// Finitely many arms, each with `‖x‖₂ ≤ 1`.
    FiniteSet(Vec<Vector>),
    /// The closed Euclidean unit ball in `d` dimensions.
    UnitBall(usize),
}

impl ActionSpace {
    /// Builds a finite space, checking it is nonempty and inside the unit ball.
    pub fn finite(arms: Vec<Vector>) -> Result<Self, OracleError> {
        if arms.is_empty() {
            return Err(OracleError::EmptyActionSet);
        }
        let d = arms[0].len();
        for (index, x) in arms.iter().enumerate() {
            if x.len() != d {
                return Err(OracleError::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            let norm = x.norm();
            if !(norm <= 1.0 + 1e-9) {
                return Err(OracleError::ActionOutsideBall { index, norm });
            }
        }
        Ok(Self::FiniteSet(arms))
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::FiniteSet(arms) => arms.first().map(|x| x.len()),
            Self::UnitBall(d) => Some(*d),
        }
    }
}

/// Index of the best arm for `theta`; ties go to the lowest index.
pub fn argmax_index(arms: &[Vector], theta: &Vector) -> Result<usize, OracleError> {
    for x in arms {
        if x.len() != theta.len() {
            return Err(OracleError::DimensionMismatch {
                expected: theta.len(),
                got: x.len(),
            });
        }
    }
    argmax_lowest(arms.iter().map(|x| x.dot(theta))).ok_or(OracleError::EmptyActionSet)
}

/// `argmax_{x ∈ space} ⟨x, θ⟩`.
///
/// On the unit ball the answer is `θ/‖θ‖₂`; for `θ = 0` every point is optimal
/// and `e₁` is returned.
pub fn amo(space: &ActionSpace, theta: &Vector) -> Result<Vector, OracleError> {
    match space {
        ActionSpace::FiniteSet(arms) => {
            let i = argmax_index(arms, theta)?;
            Ok(arms[i].clone())
        }
        ActionSpace::UnitBall(d) => {
            if theta.len() != *d {
                return Err(OracleError::DimensionMismatch {
                    expected: *d,
                    got: theta.len(),
                });
            }
            let norm = theta.norm();
            if norm > 0.0 {
                Ok(theta / norm)
            } else {
                let mut e1 = Vector::zeros(*d);
                if *d > 0 {
                    e1[0] = 1.0;
                }
                Ok(e1)
            }
        }
    }
}
