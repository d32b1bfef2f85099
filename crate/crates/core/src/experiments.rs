//! Sample averages of exact solution counts over random instances, set
//! against the asymptotic predictors.

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crypto::{row_dot, AntipodalMatrix, Plaintext, RngBits};
use crate::predictor::{s_eve_expected, s_eve_hamming, s_steve_expected};
use crate::seeds::{derive_rng, pair_stream};
use crate::ssp::{
    count_gamma_with_budget, count_solutions, enumerate_solutions, eve_reduction,
    hamming_histogram, MAX_DP_CELLS,
};
use crate::{Error, Result};

/// Largest solution set materialized per instance in the Hamming protocol.
pub const HAMMING_ENUM_BUDGET: usize = 50_000_000;

/// One point of a sample-average comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountPoint {
    pub n: usize,
    /// Hamming distance for the per-distance protocol, else `None`.
    pub h: Option<usize>,
    pub instances: usize,
    pub sample_mean: f64,
    pub sample_std: f64,
    pub predicted: f64,
    pub log2_sample_mean: f64,
    pub log2_predicted: f64,
}

impl CountPoint {
    fn new(n: usize, h: Option<usize>, samples: &[f64], predicted: f64) -> Self {
        let (sample_mean, sample_std) = crate::recovery::mean_std(samples);
        CountPoint {
            n,
            h,
            instances: samples.len(),
            sample_mean,
            sample_std,
            predicted,
            log2_sample_mean: sample_mean.log2(),
            log2_predicted: predicted.log2(),
        }
    }

    /// `|log2 mean - log2 predicted|`.
    pub fn log2_gap(&self) -> f64 {
        (self.log2_sample_mean - self.log2_predicted).abs()
    }

    /// `mean / predicted`.
    pub fn ratio(&self) -> f64 {
        self.sample_mean / self.predicted
    }
}

/// Entries uniform over `{-L..L} \ {0}`.
pub fn random_plaintext<R: Rng + ?Sized>(n: usize, bound: i64, rng: &mut R) -> Result<Plaintext> {
    let xs = (0..n)
        .map(|_| {
            let v = rng.random_range(1..=bound);
            if rng.random() {
                v
            } else {
                -v
            }
        })
        .collect();
    Plaintext::new(xs, bound)
}

fn check(ns: &[usize], bound: u64, instances: usize) -> Result<()> {
    if instances == 0 {
        return Err(Error::Config("need at least one instance".into()));
    }
    if bound == 0 || bound > i64::MAX as u64 / 64 {
        return Err(Error::Config(format!("L = {bound} out of range")));
    }
    if ns.iter().any(|&n| n == 0 || n > 64) {
        return Err(Error::Config("n must lie in 1..=64".into()));
    }
    Ok(())
}

fn instance_rng(seed: u64, n: usize, i: usize) -> rand_chacha::ChaCha8Rng {
    derive_rng(seed, pair_stream(n as u64, i as u64))
}

/// Eavesdropper instance: random plaintext, random row, `y = row . x`.
fn eve_instance(n: usize, bound: u64, seed: u64, i: usize) -> Result<crate::SspInstance> {
    let mut rng = instance_rng(seed, n, i);
    let x = random_plaintext(n, bound as i64, &mut rng)?;
    let a = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng));
    let y = row_dot(a.row(0), x.entries());
    eve_reduction(&x, y, Some(a.row(0)), 0)
}

/// Mean eavesdropper solution count per `n`, by exact DP counting.
pub fn eve_count_sweep(
    ns: &[usize],
    bound: u64,
    instances: usize,
    seed: u64,
) -> Result<Vec<CountPoint>> {
    check(ns, bound, instances)?;
    ns.iter()
        .map(|&n| {
            let samples: Vec<f64> = (0..instances)
                .into_par_iter()
                .map(|i| {
                    let inst = eve_instance(n, bound, seed, i)?;
                    Ok(count_solutions(&inst)?.to_f64().unwrap_or(f64::INFINITY))
                })
                .collect::<Result<_>>()?;
            Ok(CountPoint::new(
                n,
                None,
                &samples,
                s_eve_expected(n, bound).to_f64(),
            ))
        })
        .collect()
}

/// Mean number of eavesdropper solutions at each Hamming distance
/// `h in hs` from the true one, by full enumeration.
pub fn eve_hamming_sweep(
    ns: &[usize],
    bound: u64,
    hs: &[usize],
    instances: usize,
    seed: u64,
) -> Result<Vec<CountPoint>> {
    check(ns, bound, instances)?;
    if ns.iter().any(|&n| n > crate::ssp::MAX_ENUM_N) {
        return Err(Error::Config(format!(
            "enumeration needs n <= {}",
            crate::ssp::MAX_ENUM_N
        )));
    }
    let mut out = Vec::new();
    for &n in ns {
        let hists: Vec<Vec<u64>> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let inst = eve_instance(n, bound, seed, i)?;
                let set = enumerate_solutions(&inst, HAMMING_ENUM_BUDGET)?;
                let truth = inst.true_mask().expect("true solution embedded");
                Ok(hamming_histogram(&set, truth)?.counts)
            })
            .collect::<Result<_>>()?;
        for &h in hs.iter().filter(|&&h| h <= n) {
            let samples: Vec<f64> = hists.iter().map(|c| c[h] as f64).collect();
            let predicted = s_eve_hamming(n, bound, h)?.to_f64();
            out.push(CountPoint::new(n, Some(h), &samples, predicted));
        }
    }
    Ok(out)
}

/// Mean class-upgrade solution count per `n` with `c = round(r n)` flips in
/// the attacked row, by exact cardinality-constrained DP counting.
///
/// Weights are `L - A0_l x_l`; the count includes subsets using zero weights.
pub fn steve_count_sweep(
    ns: &[usize],
    bound: u64,
    flips: impl Fn(usize) -> usize + Sync,
    instances: usize,
    seed: u64,
) -> Result<Vec<CountPoint>> {
    check(ns, bound, instances)?;
    ns.iter()
        .map(|&n| {
            let c = flips(n);
            if c == 0 || c >= n {
                return Err(Error::Domain(format!("need 0 < c < n, got c={c} n={n}")));
            }
            let samples: Vec<f64> = (0..instances)
                .into_par_iter()
                .map(|i| {
                    let mut rng = instance_rng(seed, n, i);
                    let x = random_plaintext(n, bound as i64, &mut rng)?;
                    let a0 = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng));
                    let mut a1 = a0.row(0).to_vec();
                    for l in rand::seq::index::sample(&mut rng, n, c) {
                        a1[l] = -a1[l];
                    }
                    let y = row_dot(&a1, x.entries());
                    let eps = y - row_dot(a0.row(0), x.entries());
                    let weights: Vec<u64> = a0
                        .row(0)
                        .iter()
                        .zip(x.entries())
                        .map(|(&a, &v)| (bound as i64 - a as i64 * v) as u64)
                        .collect();
                    let target = (eps / 2 + (bound * c as u64) as i64) as u64;
                    let count = count_gamma_with_budget(&weights, target, c, MAX_DP_CELLS)?;
                    Ok(count.to_f64().unwrap_or(f64::INFINITY))
                })
                .collect::<Result<_>>()?;
            let predicted = s_steve_expected(n, bound, c as f64 / n as f64)?.to_f64();
            Ok(CountPoint::new(n, None, &samples, predicted))
        })
        .collect()
}
