use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::SparseBasis;
use super::metrics::mean_std;
use super::signal::synth_sparse;
use super::solver::{Decoder, StopRule};
use crate::crypto::{apply_flips, bound_for_bits, encode, AntipodalMatrix, FlipSet, RngBits};
use crate::seeds::{derive_rng, pair_stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSweepConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Plaintext word length; entries are bounded by `2^(bits-1) - 1`.
    pub bits: u32,
    pub etas: Vec<f64>,
    pub seeds: usize,
    pub master_seed: u64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaPoint {
    pub eta: f64,
    pub mean_rsnr_db: f64,
    pub std_db: f64,
    pub n_seeds: usize,
}

/// Second-class recovery quality against flip density: per seed, one signal
/// and one true matrix shared across the grid, decoded with the flipped
/// matrix.
pub fn eta_sweep(cfg: &EtaSweepConfig) -> Result<Vec<EtaPoint>> {
    if cfg.m >= cfg.n || cfg.m == 0 {
        return Err(Error::Config(format!(
            "need 0 < m < n, got m={} n={}",
            cfg.m, cfg.n
        )));
    }
    if let Some(eta) = cfg.etas.iter().find(|e| !(0.0..1.0).contains(*e)) {
        return Err(Error::Domain(format!("eta = {eta} outside [0, 1)")));
    }
    if cfg.seeds == 0 {
        return Err(Error::Config("need at least one seed".into()));
    }
    let basis = SparseBasis::dct(cfg.n);
    let bound = bound_for_bits(cfg.bits);
    let per_seed: Vec<Vec<f64>> = (0..cfg.seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = derive_rng(cfg.master_seed, seed as u64);
            let sig = synth_sparse(cfg.k, bound, &basis, &mut rng)?;
            let a1 = AntipodalMatrix::from_bits(cfg.m, cfg.n, &mut RngBits::new(&mut rng));
            let y = encode(&sig.x, &a1)?;
            let yf: Vec<f64> = y.entries.iter().map(|&v| v as f64).collect();
            let xf = sig.x_f64();
            cfg.etas
                .iter()
                .enumerate()
                .map(|(i, &eta)| {
                    let mut frng =
                        derive_rng(cfg.master_seed, pair_stream(seed as u64 + 1, i as u64));
                    let flips =
                        FlipSet::draw_density(cfg.m, cfg.n, eta, &mut RngBits::new(&mut frng))?;
                    let a0 = apply_flips(&a1, &flips)?;
                    let res = Decoder::antipodal(&a0, &basis)?.decode(
                        &yf,
                        StopRule::Sparsity(cfg.k),
                        cfg.max_iter,
                        Some(&xf),
                    )?;
                    Ok(res.rsnr_db.expect("reference supplied"))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(cfg
        .etas
        .iter()
        .enumerate()
        .map(|(i, &eta)| {
            let vals: Vec<f64> = per_seed.iter().map(|v| v[i]).collect();
            let (mean_rsnr_db, std_db) = mean_std(&vals);
            EtaPoint {
                eta,
                mean_rsnr_db,
                std_db,
                n_seeds: vals.len(),
            }
        })
        .collect())
}
