use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Orthonormal sparsity basis `D`; signals are `x = D s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBasis {
    kind: BasisKind,
    d: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Identity,
    Dct,
    Custom,
}

impl SparseBasis {
    pub fn identity(n: usize) -> Self {
        SparseBasis {
            kind: BasisKind::Identity,
            d: DMatrix::identity(n, n),
        }
    }

    /// Orthonormal DCT-II synthesis matrix, `D[i][k] = a_k cos(pi (i + 1/2) k / n)`.
    pub fn dct(n: usize) -> Self {
        let nf = n as f64;
        let d = DMatrix::from_fn(n, n, |i, k| {
            let a = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            a * (PI * (i as f64 + 0.5) * k as f64 / nf).cos()
        });
        SparseBasis {
            kind: BasisKind::Dct,
            d,
        }
    }

    /// User-supplied basis; rejected unless `D^T D = I` to `1e-10` per entry.
    pub fn custom(d: DMatrix<f64>) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::DimensionMismatch {
                expected: d.nrows(),
                actual: d.ncols(),
            });
        }
        let gram = d.transpose() * &d;
        let err = (gram - DMatrix::identity(d.nrows(), d.nrows())).amax();
        if err > 1e-10 {
            return Err(Error::Config(format!(
                "basis is not orthonormal (max deviation {err:e})"
            )));
        }
        Ok(SparseBasis {
            kind: BasisKind::Custom,
            d,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn synthesize(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.d * s
    }

    pub fn analyze(&self, x: &DVector<f64>) -> DVector<f64> {
        self.d.tr_mul(x)
    }
}
