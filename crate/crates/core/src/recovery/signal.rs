use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::basis::SparseBasis;
use super::metrics::rsnr;
use crate::crypto::Plaintext;
use crate::{Error, Result};

/// A quantized sparse test signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub x: Plaintext,
    /// `k`-sparse coefficients, scaled so that `D s` peaks at `L`.
    pub coefficients: Vec<f64>,
    /// `D s` before rounding.
    pub ideal: Vec<f64>,
    /// Entries that rounded to zero and were moved to `+-1`.
    pub nudged: usize,
    /// Quantization quality, `rsnr(ideal, x)`.
    pub quantization_rsnr_db: f64,
}

impl SparseSignal {
    pub fn x_f64(&self) -> Vec<f64> {
        self.x.entries().iter().map(|&v| v as f64).collect()
    }
}

/// `k` Gaussian coefficients at uniform positions, synthesized by `basis`,
/// scaled to peak magnitude `L`, rounded, and with zeros nudged to `+-1`.
pub fn synth_sparse<R: Rng + ?Sized>(
    k: usize,
    bound: i64,
    basis: &SparseBasis,
    rng: &mut R,
) -> Result<SparseSignal> {
    let n = basis.n();
    if k == 0 || k > n {
        return Err(Error::Config(format!("sparsity {k} outside 1..={n}")));
    }
    if bound < 1 {
        return Err(Error::Config(format!("bound {bound} must be positive")));
    }
    let mut s = DVector::zeros(n);
    for j in rand::seq::index::sample(rng, n, k) {
        s[j] = rng.sample::<f64, _>(StandardNormal);
    }
    let mut ideal = basis.synthesize(&s);
    let peak = ideal.amax();
    if peak == 0.0 {
        return Err(Error::Config("degenerate signal".into()));
    }
    let scale = bound as f64 / peak;
    s *= scale;
    ideal *= scale;
    let mut nudged = 0;
    let entries: Vec<i64> = ideal
        .iter()
        .map(|&v| {
            let q = (v.round() as i64).clamp(-bound, bound);
            if q == 0 {
                nudged += 1;
                if rng.random::<bool>() {
                    1
                } else {
                    -1
                }
            } else {
                q
            }
        })
        .collect();
    let ideal: Vec<f64> = ideal.iter().copied().collect();
    let xf: Vec<f64> = entries.iter().map(|&v| v as f64).collect();
    let quantization_rsnr_db = rsnr(&ideal, &xf)?;
    Ok(SparseSignal {
        x: Plaintext::new(entries, bound)?,
        coefficients: s.iter().copied().collect(),
        ideal,
        nudged,
        quantization_rsnr_db,
    })
}
