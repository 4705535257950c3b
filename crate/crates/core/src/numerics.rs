//! Small dense linear-algebra kernel used by the estimators.
//!
//! Everything here works on `nalgebra` dynamic vectors and matrices. The
//! only factorization is Cholesky: it backs solves, `‖x‖_{A⁻¹}` norms and
//! correlated Gaussian sampling (`L·z` has law `N(0, A)` whenever `L·Lᵀ = A`,
//! so no symmetric square root is ever formed).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Column vector of features or parameters.
pub type Vector = DVector<f64>;
/// Dense square matrix.
pub type Matrix = DMatrix<f64>;

/// Relative symmetry tolerance accepted by [`SpdFactor::new`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not positive definite (pivot {pivot} failed after jitter)")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not symmetric: |A[{row},{col}] - A[{col},{row}]| exceeds tolerance")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = A`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    lower: Matrix,
    jittered: bool,
}

impl SpdFactor {
    /// Factors a symmetric positive-definite matrix.
    ///
    /// On failure a ridge of `1e-10·trace(A)/d` is added and the factorization
    /// retried once; a second failure is reported as `NotPositiveDefinite`.
    pub fn new(a: &Matrix) -> Result<Self, NumericsError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(NumericsError::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        check_symmetric(a)?;
        match cholesky_lower(a) {
            Ok(lower) => Ok(Self {
                lower,
                jittered: false,
            }),
            Err(_) => {
                let eps = 1e-10 * a.trace().abs() / n as f64;
                let mut shifted = a.clone();
                for i in 0..n {
                    shifted[(i, i)] += eps;
                }
                let lower = cholesky_lower(&shifted)
                    .map_err(|pivot| NumericsError::NotPositiveDefinite { pivot })?;
                Ok(Self {
                    lower,
                    jittered: true,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// The factor `L`.
    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// Whether the jitter retry was needed.
    pub fn jittered(&self) -> bool {
        self.jittered
    }

    /// `L·Lᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        &self.lower * self.lower.transpose()
    }

    /// Solves `A·x = b`.
    pub fn solve(&self, b: &Vector) -> Result<Vector, NumericsError> {
        self.check_dim(b.len())?;
        let y = self.forward(b);
        Ok(self
            .lower
            .tr_solve_lower_triangular(&y)
            .expect("Cholesky factor has a nonzero diagonal"))
    }

    /// Solves `A·X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix, NumericsError> {
        self.check_dim(b.nrows())?;
        let y = self
            .lower
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a nonzero diagonal");
        Ok(self
            .lower
            .tr_solve_lower_triangular(&y)
            .expect("Cholesky factor has a nonzero diagonal"))
    }

    /// `A⁻¹`, formed explicitly.
    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        self.solve_matrix(&Matrix::identity(n, n))
            .expect("identity has matching dimension")
    }

    /// `‖x‖_{A⁻¹} = √(xᵀA⁻¹x)`, computed as `‖L⁻¹x‖₂`.
    pub fn quad_norm(&self, x: &Vector) -> Result<f64, NumericsError> {
        self.check_dim(x.len())?;
        Ok(self.forward(x).norm())
    }

    /// `L·z`.
    pub fn mul_lower(&self, z: &Vector) -> Result<Vector, NumericsError> {
        self.check_dim(z.len())?;
        Ok(&self.lower * z)
    }

    fn forward(&self, b: &Vector) -> Vector {
        self.lower
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a nonzero diagonal")
    }

    fn check_dim(&self, got: usize) -> Result<(), NumericsError> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(NumericsError::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        }
    }
}

/// Factors `a` (see [`SpdFactor::new`]).
pub fn spd_factor(a: &Matrix) -> Result<SpdFactor, NumericsError> {
    SpdFactor::new(a)
}

/// Solves `A·x = b` given the factor of `A`.
pub fn spd_solve(factor: &SpdFactor, b: &Vector) -> Result<Vector, NumericsError> {
    factor.solve(b)
}

/// `‖x‖_{A⁻¹}` given the factor of `A`.
pub fn quad_norm(factor: &SpdFactor, x: &Vector) -> Result<f64, NumericsError> {
    factor.quad_norm(x)
}

fn check_symmetric(a: &Matrix) -> Result<(), NumericsError> {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let (aij, aji) = (a[(i, j)], a[(j, i)]);
            if !aij.is_finite() || !aji.is_finite() {
                return Err(NumericsError::InvalidArgument(format!(
                    "non-finite entry at ({i},{j})"
                )));
            }
            if (aij - aji).abs() > SYMMETRY_TOL * aij.abs().max(1.0) {
                return Err(NumericsError::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

// Reads the lower triangle only. Err carries the failing pivot index.
fn cholesky_lower(a: &Matrix) -> Result<Matrix, usize> {
    let n = a.nrows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(j);
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Draws `d` i.i.d. `N(0, scale²)` entries.
///
/// Always consumes exactly `d` normal draws, also for `scale = 0`, so that
/// streams stay aligned across configurations.
pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> Vector {
    Vector::from_fn(d, |_, _| {
        let z: f64 = rng.sample(StandardNormal);
        scale * z
    })
}

/// Closed-form Gaussian tail bracket for a standardized deviation `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBounds {
    /// `exp(−7z²/2) / (4√π)`
    pub lower: f64,
    /// `exp(−z²/2) / 2`
    pub upper: f64,
}

/// Anti-concentration (lower) and concentration (upper) bounds for a Gaussian
/// exceeding `z` standard deviations.
///
/// Both closed forms are returned verbatim. They bracket the one-sided tail
/// `P(Z − μ > zσ)`; the upper form does not bound the two-sided tail for small `z`.
pub fn gaussian_tail_bounds(z: f64) -> Result<TailBounds, NumericsError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(NumericsError::InvalidArgument(format!(
            "tail bound needs z > 0, got {z}"
        )));
    }
    let lower = (-3.5 * z * z).exp() / (4.0 * std::f64::consts::PI.sqrt());
    let upper = 0.5 * (-0.5 * z * z).exp();
    Ok(TailBounds { lower, upper })
}

/// Index of the largest entry; ties resolve to the lowest index.
pub(crate) fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, bv)) if !(v > bv) => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
