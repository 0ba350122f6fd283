//! Loss functions over forecast residuals.
//!
//! Every supported loss is a nonnegative function of the residual alone with
//! l(0) = 0. Each kind fixes its modified-triangle constant Delta and its
//! sub-multiplicativity, the two properties the growing-memory bound needs.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Supported residual losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Squared euclidean norm of the residual (square of a scalar residual).
    Squared,
    /// Absolute value; scalar residuals only.
    Absolute,
    /// Euclidean norm of the residual vector.
    EuclideanNorm,
}

/// A loss together with the constants the bounds need.
///
/// `delta` is the modified-triangle constant (2 for squared, 1 for the
/// norms), `k` an optional uniform bound on the loss, and `m` an optional
/// bound on the second loss moment `sqrt(E[l^2])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    kind: LossKind,
    k: Option<f64>,
    m: Option<f64>,
}

impl LossSpec {
    pub fn squared() -> Self {
        LossSpec {
            kind: LossKind::Squared,
            k: None,
            m: None,
        }
    }

    pub fn absolute() -> Self {
        LossSpec {
            kind: LossKind::Absolute,
            k: None,
            m: None,
        }
    }

    pub fn euclidean_norm() -> Self {
        LossSpec {
            kind: LossKind::EuclideanNorm,
            k: None,
            m: None,
        }
    }

    /// Declares a uniform bound 0 <= l <= k.
    pub fn with_uniform_bound(mut self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput("uniform loss bound must be positive".to_string()));
        }
        self.k = Some(k);
        Ok(self)
    }

    /// Declares the moment bound M with sqrt(E[l^2]) <= M.
    pub fn with_moment_bound(mut self, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidInput("moment bound must be positive".to_string()));
        }
        self.m = Some(m);
        Ok(self)
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    /// Modified triangle constant: l(y + y') <= delta * (l(y) + l(y')).
    pub fn delta(&self) -> f64 {
        match self.kind {
            LossKind::Squared => 2.0,
            LossKind::Absolute | LossKind::EuclideanNorm => 1.0,
        }
    }

    /// All supported kinds satisfy l(y y') <= l(y) l(y').
    pub fn submultiplicative(&self) -> bool {
        true
    }

    pub fn uniform_bound(&self) -> Option<f64> {
        self.k
    }

    pub fn moment_bound(&self) -> Option<f64> {
        self.m
    }

    /// Evaluates the loss at a residual vector.
    pub fn eval(&self, residual: &[f64]) -> f64 {
        match self.kind {
            LossKind::Squared => residual.iter().map(|r| r * r).sum(),
            LossKind::Absolute => {
                debug_assert_eq!(residual.len(), 1, "absolute loss expects scalar residuals");
                residual.iter().map(|r| r.abs()).sum()
            }
            LossKind::EuclideanNorm => residual.iter().map(|r| r * r).sum::<f64>().sqrt(),
        }
    }

    /// Evaluates the loss at a scalar residual.
    pub fn eval_scalar(&self, r: f64) -> f64 {
        self.eval(&[r])
    }

    /// Kind-consistent value on a matrix argument (weight blocks in the
    /// truncation penalty): operator 2-norm for the norms, its square for
    /// squared loss, plain absolute value for 1x1 matrices.
    pub fn eval_matrix(&self, b: &Mat) -> f64 {
        if b.nrows() == 1 && b.ncols() == 1 {
            return self.eval_scalar(b[(0, 0)]);
        }
        let nm = b.op_norm2();
        match self.kind {
            LossKind::Squared => nm * nm,
            LossKind::Absolute | LossKind::EuclideanNorm => nm,
        }
    }

    /// Checks a residual against the series dimension before evaluating.
    pub fn eval_checked(&self, residual: &[f64], dim: usize) -> Result<f64> {
        if residual.len() != dim {
            return Err(Error::DimensionMismatch("residual dimension != series dimension".to_string()));
        }
        if self.kind == LossKind::Absolute && dim != 1 {
            return Err(Error::DimensionMismatch("absolute loss expects scalar residuals".to_string()));
        }
        Ok(self.eval(residual))
    }
}

/// Difference of two equal-length vectors.
pub(crate) fn residual(y: &[f64], yhat: &[f64]) -> Vec<f64> {
    y.iter().zip(yhat.iter()).map(|(a, b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_residual_gives_zero_loss() {
        for loss in [LossSpec::squared(), LossSpec::absolute(), LossSpec::euclidean_norm()] {
            assert_eq!(loss.eval(&[0.0]), 0.0);
        }
    }

    #[test]
    fn pythagorean_norm() {
        assert_abs_diff_eq!(LossSpec::euclidean_norm().eval(&[3.0, 4.0]), 5.0);
    }

    #[test]
    fn squared_scalar() {
        assert_abs_diff_eq!(LossSpec::squared().eval(&[2.0]), 4.0);
    }

    #[test]
    fn delta_constants() {
        assert_eq!(LossSpec::squared().delta(), 2.0);
        assert_eq!(LossSpec::absolute().delta(), 1.0);
        assert_eq!(LossSpec::euclidean_norm().delta(), 1.0);
    }

    #[test]
    fn squared_is_absolute_squared_for_scalars() {
        for r in [-2.5, -0.1, 0.0, 0.7, 3.0] {
            let a = LossSpec::absolute().eval_scalar(r);
            assert_abs_diff_eq!(LossSpec::squared().eval_scalar(r), a * a, epsilon = 1e-15);
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(LossSpec::squared().eval_checked(&[1.0, 2.0], 1).is_err());
        assert!(LossSpec::absolute().eval_checked(&[1.0, 2.0], 2).is_err());
        assert!(LossSpec::euclidean_norm().eval_checked(&[1.0, 2.0], 2).is_ok());
    }

    #[test]
    fn positive_only_loss_nonnegative_everywhere() {
        for r in [-5.0, -1e-9, 0.0, 1e-9, 5.0] {
            for loss in [LossSpec::squared(), LossSpec::absolute(), LossSpec::euclidean_norm()] {
                assert!(loss.eval(&[r]) >= 0.0);
                assert!((loss.eval(&[r]) == 0.0) == (r == 0.0));
            }
        }
    }

    #[test]
    fn matrix_eval_matches_scalar_for_1x1() {
        let b = Mat::scalar(-0.3);
        assert_abs_diff_eq!(LossSpec::squared().eval_matrix(&b), 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(LossSpec::euclidean_norm().eval_matrix(&b), 0.3, epsilon = 1e-15);
    }
}
