//! Design-matrix accumulation, ordinary least squares over basis-path
//! observations, and the confidence radii the routing policies compare
//! against.
//!
//! Exploration proceeds in epochs: every basis path is selected once per
//! epoch, so after `m` epochs the Gram matrix is exactly `m * B B^T`. The
//! estimate is recomputed from the accumulated sums at each epoch end;
//! at the dimensions this crate targets there is no reason to maintain
//! incremental factorizations.

use thiserror::Error;

use crate::linalg::{self, pinv, solve, LinalgError, Matrix};
use crate::scalar::Scalar;
use crate::spanner::Basis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("estimator requires at least one recorded epoch")]
    NoData,
}

/// Accumulated exploration data: epoch count, Gram matrix, per-basis-path
/// response sums, and the current estimate.
#[derive(Debug, Clone)]
pub struct DesignState<F> {
    basis: Basis<F>,
    m: usize,
    v: Matrix<F>,
    bbt: Matrix<F>,
    responses_sum: Vec<F>,
    mu_hat: Vec<F>,
}

impl<F: Scalar> DesignState<F> {
    pub fn new(basis: Basis<F>) -> Self {
        let d = basis.dim();
        let b = basis.matrix();
        let bbt = b.matmul(&b.transpose());
        let d0 = basis.d0();
        DesignState {
            basis,
            m: 0,
            v: Matrix::zeros(d, d),
            bbt,
            responses_sum: vec![F::zero(); d0],
            mu_hat: vec![F::zero(); d],
        }
    }

    pub fn basis(&self) -> &Basis<F> {
        &self.basis
    }

    pub fn epochs(&self) -> usize {
        self.m
    }

    /// Current estimate of the link-delay vector; all zeros before the
    /// first recorded epoch.
    pub fn mu_hat(&self) -> &[F] {
        &self.mu_hat
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.v
    }

    /// Folds in one epoch of losses, `losses[i]` being the observed
    /// end-to-end delay of basis path `i`, and recomputes the estimate.
    pub fn record_epoch(&mut self, losses: &[F]) -> Result<(), EstimateError> {
        if losses.len() != self.basis.d0() {
            return Err(EstimateError::DimensionMismatch {
                expected: self.basis.d0(),
                got: losses.len(),
            });
        }
        self.m += 1;
        for (acc, &l) in self.responses_sum.iter_mut().zip(losses) {
            *acc = *acc + l;
        }
        self.v = self.v.add(&self.bbt);
        self.mu_hat = if self.basis.d0() == self.basis.dim() {
            self.ols_identifiable()?
        } else {
            self.ols_general()?
        };
        Ok(())
    }

    /// `D^T r`: the design matrix applied to the response vector,
    /// assembled from the per-path response sums.
    pub fn design_response(&self) -> Vec<F> {
        let d = self.basis.dim();
        let mut out = vec![F::zero(); d];
        for (path, &sum) in self.basis.paths().iter().zip(&self.responses_sum) {
            for &j in path.links() {
                out[j as usize] = out[j as usize] + sum;
            }
        }
        out
    }

    /// OLS through the Gram inverse; requires a basis spanning the full
    /// link space.
    pub fn ols_identifiable(&self) -> Result<Vec<F>, EstimateError> {
        if self.m == 0 {
            return Err(EstimateError::NoData);
        }
        if self.basis.d0() != self.basis.dim() {
            return Err(EstimateError::SingularGram);
        }
        solve(&self.v, &self.design_response()).map_err(|e| match e {
            LinalgError::SingularMatrix => EstimateError::SingularGram,
            LinalgError::DimensionMismatch { expected, got } => {
                EstimateError::DimensionMismatch { expected, got }
            }
            LinalgError::NotPositiveDefinite => EstimateError::SingularGram,
        })
    }

    /// OLS through the Moore-Penrose pseudo-inverse; the minimum-norm
    /// minimizer, defined for any basis rank.
    pub fn ols_general(&self) -> Result<Vec<F>, EstimateError> {
        if self.m == 0 {
            return Err(EstimateError::NoData);
        }
        let p = pinv(&self.v, F::of(linalg::DEFAULT_PINV_RTOL));
        Ok(p.matvec(&self.design_response()))
    }
}

/// Constants of a confidence radius: spanner constant, sub-Gaussian noise
/// scale, effective dimension, and failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceParams<F> {
    pub s: F,
    pub r: F,
    pub dim: usize,
    pub delta: F,
}

impl<F: Scalar> ConfidenceParams<F> {
    pub fn new(s: F, r: F, dim: usize, delta: F) -> Self {
        assert!(s > F::zero() && r >= F::zero());
        assert!(delta > F::zero() && delta < F::one());
        assert!(dim >= 1);
        ConfidenceParams { s, r, dim, delta }
    }
}

/// Deviation radius after `m` exploration epochs on an identifiable
/// network: `S R sqrt((2 ln2 d^2 + 4 d ln(1/delta)) / m)`.
pub fn radius_identifiable<F: Scalar>(m: usize, p: &ConfidenceParams<F>) -> F {
    assert!(m >= 1);
    let d = F::of(p.dim as f64);
    let ln2 = F::of(std::f64::consts::LN_2);
    let num = F::of(2.0) * ln2 * d * d + F::of(4.0) * d * p.delta.recip().ln();
    p.s * p.r * (num / F::of(m as f64)).sqrt()
}

/// Deviation radius after `m` exploration epochs on a general network:
/// `S R sqrt((32 ln6 d0^2 + 32 d0 ln(1/delta)) / m)`.
pub fn radius_general<F: Scalar>(m: usize, p: &ConfidenceParams<F>) -> F {
    assert!(m >= 1);
    let d0 = F::of(p.dim as f64);
    let ln6 = F::of(6.0f64.ln());
    let num = F::of(32.0) * ln6 * d0 * d0 + F::of(32.0) * d0 * p.delta.recip().ln();
    p.s * p.r * (num / F::of(m as f64)).sqrt()
}
