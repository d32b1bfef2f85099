//! Orthogonal matching pursuit with an iterative-shrinkage refinement.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::SparseBasis;
use super::metrics::rsnr;
use crate::crypto::AntipodalMatrix;
use crate::{Error, Result};

/// When greedy atom selection stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Exactly `k` atoms.
    Sparsity(usize),
    /// Until `|A x - y|_2 <= omega`.
    Tolerance(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub support: Vec<usize>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// False when the stop rule was not met within the iteration budget.
    pub converged: bool,
    pub rsnr_db: Option<f64>,
}

/// Precomputed `Phi = A D` for repeated decoding with one matrix.
pub struct Decoder<'a> {
    basis: &'a SparseBasis,
    phi: DMatrix<f64>,
    col_norms: Vec<f64>,
    lipschitz: f64,
}

impl<'a> Decoder<'a> {
    pub fn new(a: &DMatrix<f64>, basis: &'a SparseBasis) -> Result<Self> {
        if a.ncols() != basis.n() {
            return Err(Error::DimensionMismatch {
                expected: basis.n(),
                actual: a.ncols(),
            });
        }
        let phi = a * basis.matrix();
        let col_norms = phi.column_iter().map(|c| c.norm()).collect();
        // largest squared singular value bounds the gradient's Lipschitz constant
        let lipschitz = phi.singular_values().max().powi(2);
        Ok(Decoder {
            basis,
            phi,
            col_norms,
            lipschitz,
        })
    }

    pub fn antipodal(a: &AntipodalMatrix, basis: &'a SparseBasis) -> Result<Self> {
        let m = DMatrix::from_row_iterator(a.rows(), a.cols(), a.signs().iter().map(|&s| s as f64));
        Self::new(&m, basis)
    }

    pub fn decode(
        &self,
        y: &[f64],
        stop: StopRule,
        max_iter: usize,
        reference: Option<&[f64]>,
    ) -> Result<RecoveryResult> {
        let m = self.phi.nrows();
        if y.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: y.len(),
            });
        }
        let y = DVector::from_column_slice(y);
        let (mut s, support, omp_iters, mut converged) = self.omp(&y, stop, max_iter);
        let mut residual = (&self.phi * &s - &y).norm();
        let mut iterations = omp_iters;

        if !support.is_empty() {
            let (refined, steps) = self.fista(&y, &s, max_iter);
            iterations += steps;
            let r_ref = (&self.phi * &refined - &y).norm();
            let bound = match stop {
                StopRule::Tolerance(w) => residual.max(w),
                StopRule::Sparsity(_) => residual,
            };
            if r_ref <= bound && refined.lp_norm(1) < s.lp_norm(1) {
                s = refined;
                residual = r_ref;
            }
        }
        if let StopRule::Tolerance(w) = stop {
            converged = residual <= w.max(1e-9 * y.norm());
        }

        let x = self.basis.synthesize(&s);
        let estimate: Vec<f64> = x.iter().copied().collect();
        let rsnr_db = reference.map(|r| rsnr(r, &estimate)).transpose()?;
        Ok(RecoveryResult {
            estimate,
            coefficients: s.iter().copied().collect(),
            support,
            residual_norm: residual,
            iterations,
            converged,
            rsnr_db,
        })
    }

    fn omp(
        &self,
        y: &DVector<f64>,
        stop: StopRule,
        max_iter: usize,
    ) -> (DVector<f64>, Vec<usize>, usize, bool) {
        let (m, n) = self.phi.shape();
        let mut support: Vec<usize> = Vec::new();
        let mut coef = DVector::zeros(0);
        let mut r = y.clone();
        let atoms = match stop {
            StopRule::Sparsity(k) => k.min(m).min(n),
            StopRule::Tolerance(_) => m.min(n),
        };
        let tol = match stop {
            StopRule::Tolerance(w) => w.max(1e-9 * y.norm()),
            StopRule::Sparsity(_) => 0.0,
        };
        let mut iters = 0;
        while support.len() < atoms && iters < max_iter {
            if matches!(stop, StopRule::Tolerance(_)) && r.norm() <= tol {
                break;
            }
            let corr = self.phi.tr_mul(&r);
            let best = (0..n)
                .filter(|j| !support.contains(j) && self.col_norms[*j] > 0.0)
                .max_by(|&i, &j| {
                    (corr[i].abs() / self.col_norms[i])
                        .total_cmp(&(corr[j].abs() / self.col_norms[j]))
                });
            let Some(j) = best else { break };
            support.push(j);
            let sub = self.phi.select_columns(&support);
            coef = match sub.clone().svd(true, true).solve(y, 1e-12) {
                Ok(c) => c,
                Err(_) => break,
            };
            r = y - sub * &coef;
            iters += 1;
        }
        let mut s = DVector::zeros(n);
        for (i, &j) in support.iter().enumerate() {
            if i < coef.len() {
                s[j] = coef[i];
            }
        }
        let converged = match stop {
            StopRule::Sparsity(k) => support.len() == k.min(m).min(n),
            StopRule::Tolerance(_) => r.norm() <= tol,
        };
        let mut sorted = support;
        sorted.sort_unstable();
        (s, sorted, iters, converged)
    }

    /// FISTA on `1/2 |Phi s - y|^2 + lambda |s|_1`, warm-started at `start`.
    fn fista(
        &self,
        y: &DVector<f64>,
        start: &DVector<f64>,
        max_iter: usize,
    ) -> (DVector<f64>, usize) {
        if self.lipschitz <= 0.0 {
            return (start.clone(), 0);
        }
        let lambda = 1e-6 * self.phi.tr_mul(y).amax();
        let step = 1.0 / self.lipschitz;
        let mut s = start.clone();
        let mut z = s.clone();
        let mut t = 1.0f64;
        let mut steps = 0;
        for _ in 0..max_iter {
            let grad = self.phi.tr_mul(&(&self.phi * &z - y));
            let next = (&z - grad * step).map(|v| soft(v, lambda * step));
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let delta = (&next - &s).norm();
            z = &next + (&next - &s) * ((t - 1.0) / t_next);
            s = next;
            t = t_next;
            steps += 1;
            if delta <= 1e-10 * (1.0 + s.norm()) {
                break;
            }
        }
        (s, steps)
    }
}

fn soft(v: f64, thr: f64) -> f64 {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        0.0
    }
}

/// One-shot recovery of `x` from `y = A x` with `x` sparse in `basis`.
pub fn recover(
    y: &[f64],
    a: &DMatrix<f64>,
    basis: &SparseBasis,
    stop: StopRule,
    max_iter: usize,
) -> Result<RecoveryResult> {
    Decoder::new(a, basis)?.decode(y, stop, max_iter, None)
}
