//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use linbandit::{Matrix, Vector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vector {
    let v = Vector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
    v.normalize()
}

/// Uniform direction, radius uniform in `[0, 1]`.
pub fn random_in_ball<R: Rng>(rng: &mut R, d: usize) -> Vector {
    random_unit(rng, d) * rng.random::<f64>()
}

/// Definitional weighted forms after observing `history` (rounds `1..t−1`):
/// `W = Σ γ^{−l} x xᵀ + λ γ^{−(t−1)} I`, `W̃ = Σ γ^{−2l} x xᵀ + λ γ^{−2(t−1)} I`,
/// `b = Σ γ^{−l} x y`.
pub fn definitional(
    history: &[(Vector, f64)],
    d: usize,
    gamma: f64,
    lambda: f64,
) -> (Matrix, Matrix, Vector) {
    let n = history.len() as i32;
    let mut w = Matrix::identity(d, d) * (lambda * gamma.powi(-n));
    let mut wt = Matrix::identity(d, d) * (lambda * gamma.powi(-2 * n));
    let mut b = Vector::zeros(d);
    for (i, (x, y)) in history.iter().enumerate() {
        let l = i as i32 + 1;
        let xx = x * x.transpose();
        w += &xx * gamma.powi(-l);
        wt += &xx * gamma.powi(-2 * l);
        b += x * (y * gamma.powi(-l));
    }
    (w, wt, b)
}

/// `(XᵀX + λI)⁻¹ Xᵀy` by dense inversion.
pub fn batch_ridge(history: &[(Vector, f64)], lambda: f64, d: usize) -> Vector {
    let mut g = Matrix::identity(d, d) * lambda;
    let mut r = Vector::zeros(d);
    for (x, y) in history {
        g += x * x.transpose();
        r += x * *y;
    }
    g.try_inverse().expect("ridge Gram is invertible") * r
}

/// `√(xᵀ W⁻¹ W̃ W⁻¹ x)` by dense inversion.
pub fn dense_exploration_norm(w: &Matrix, wt: &Matrix, x: &Vector) -> f64 {
    let wi = w.clone().try_inverse().expect("invertible");
    let m = &wi * wt * &wi;
    (x.transpose() * m * x)[(0, 0)].sqrt()
}

/// `V⁻¹` for `V = W W̃⁻¹ W`, by dense inversion of `V`.
pub fn dense_v_inverse(w: &Matrix, wt: &Matrix) -> Matrix {
    let v = w * wt.clone().try_inverse().expect("invertible") * w;
    v.try_inverse().expect("invertible")
}

pub fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
