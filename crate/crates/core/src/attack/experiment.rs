//! The full attack/verify experiment: candidates are built row by row from
//! one known pair, then scored on that pair and on a fresh one.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::{eve_repair_row, eve_search_row, steve_search_row};
use crate::crypto::{
    apply_flips, bound_for_bits, encode, AntipodalMatrix, Ciphertext, FlipSet, Plaintext, RngBits,
};
use crate::predictor::{s_eve_expected, s_steve_expected};
use crate::recovery::{
    mean_std, pearson, recover, rsnr, synth_sparse, Decoder, SparseBasis, StopRule,
};
use crate::seeds::{derive_rng, pair_stream};
use crate::{Error, LogCount, Result, VERSION};

/// Configurations whose predicted mean draws per row exceed this are refused.
pub const MAX_MEAN_DRAWS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attacker {
    Eve,
    Steve,
}

/// How second-class flips are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMode {
    /// `round(eta n)` flips in every row.
    PerRow,
    /// `round(eta m n)` flips anywhere in the matrix.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpaConfig {
    pub attacker: Attacker,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Plaintext word length `B_x`.
    pub bits: u32,
    pub eta: f64,
    pub flip_mode: FlipMode,
    pub candidates: usize,
    pub master_seed: u64,
    pub max_draws_per_row: u64,
    /// Opt-in greedy repair for the eavesdropper; fast but not uniform.
    #[serde(default)]
    pub greedy_repair: bool,
    pub max_iter: usize,
    /// Fresh pairs used for verification; RSNR'' is averaged over them in dB.
    #[serde(default = "one")]
    pub verification_pairs: usize,
}

fn one() -> usize {
    1
}

impl KpaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m >= self.n {
            return Err(Error::Config(format!(
                "need 0 < m < n, got m={} n={}",
                self.m, self.n
            )));
        }
        if self.k == 0 || self.k > self.m {
            return Err(Error::Config(format!(
                "sparsity k={} outside 1..=m",
                self.k
            )));
        }
        if !(2..=32).contains(&self.bits) {
            return Err(Error::Config(format!("B_x = {} outside 2..=32", self.bits)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::Domain(format!("eta = {} outside [0, 1)", self.eta)));
        }
        if self.verification_pairs == 0 {
            return Err(Error::Config("need at least one verification pair".into()));
        }
        if self.candidates == 0 {
            return Err(Error::Config("need at least one candidate".into()));
        }
        Ok(())
    }

    /// Flips per row in [`FlipMode::PerRow`].
    pub fn row_flips(&self) -> usize {
        (self.eta * self.n as f64).round() as usize
    }
}

/// One candidate matrix and its scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpaExperimentRecord {
    pub candidate_id: usize,
    /// RSNR decoding the known pair with the candidate.
    pub rsnr1_db: f64,
    /// RSNR decoding the verification pair with the candidate.
    pub rsnr2_db: f64,
    pub draws_total: u64,
    pub row_draws: Vec<u64>,
    /// Entries where the candidate differs from the true matrix.
    pub hamming_to_true: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpaSummary {
    pub config: KpaConfig,
    pub version: String,
    pub candidates: usize,
    pub mean_rsnr1_db: f64,
    pub std_rsnr1_db: f64,
    pub mean_rsnr2_db: f64,
    pub std_rsnr2_db: f64,
    pub pearson_rho: f64,
    /// Verification pairs decoded with the second-class matrix.
    pub nominal_second_class_rsnr_db: f64,
    /// The true matrix injected as a candidate (control arm).
    pub control_rsnr1_db: f64,
    pub control_rsnr2_db: f64,
    /// Verification pairs decoded directly with the true matrix.
    pub first_class_rsnr_db: f64,
    pub mean_draws_per_row: f64,
    /// Predicted mean draws per row for the largest row.
    pub predicted_draws_per_row: f64,
    pub flips_total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpaOutcome {
    pub records: Vec<KpaExperimentRecord>,
    pub summary: KpaSummary,
}

/// Predicted mean draws for one row search, from the expected solution counts.
pub fn predicted_draws(attacker: Attacker, n: usize, bound: i64, c: usize) -> LogCount {
    match attacker {
        Attacker::Eve => LogCount::from_log2(n as f64) / s_eve_expected(n, bound as u64),
        Attacker::Steve => {
            if c == 0 {
                return LogCount::ONE;
            }
            let subsets = LogCount::from_biguint(&binomial(n, c));
            match s_steve_expected(n, bound as u64, c as f64 / n as f64) {
                Ok(s) if s.log2() > 0.0 => subsets / s,
                _ => subsets,
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::from(1u8), |acc, i| acc * (n - i) / (i + 1))
}

struct Setup {
    basis: SparseBasis,
    x1: Plaintext,
    x2: Vec<Plaintext>,
    a0: AntipodalMatrix,
    a1: AntipodalMatrix,
    y1: Ciphertext,
    y2: Vec<Ciphertext>,
    row_flips: Vec<usize>,
    flips_total: usize,
}

fn setup(cfg: &KpaConfig) -> Result<Setup> {
    let mut rng = derive_rng(cfg.master_seed, 0);
    let basis = SparseBasis::dct(cfg.n);
    let bound = bound_for_bits(cfg.bits);
    let x1 = synth_sparse(cfg.k, bound, &basis, &mut rng)?.x;
    let x2 = (0..cfg.verification_pairs)
        .map(|_| synth_sparse(cfg.k, bound, &basis, &mut rng).map(|s| s.x))
        .collect::<Result<Vec<_>>>()?;
    let mut bits = RngBits::new(&mut rng);
    let a0 = AntipodalMatrix::from_bits(cfg.m, cfg.n, &mut bits);
    let flips = match cfg.flip_mode {
        FlipMode::PerRow => {
            FlipSet::draw_per_row(cfg.m, cfg.n, &vec![cfg.row_flips(); cfg.m], &mut bits)?
        }
        FlipMode::Uniform => FlipSet::draw_density(cfg.m, cfg.n, cfg.eta, &mut bits)?,
    };
    let a1 = apply_flips(&a0, &flips)?;
    let y1 = encode(&x1, &a1)?;
    let y2 = x2
        .iter()
        .map(|x| encode(x, &a1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Setup {
        basis,
        x1,
        x2,
        a0,
        a1,
        y1,
        y2,
        row_flips: flips.row_counts(),
        flips_total: flips.len(),
    })
}

fn to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&e| e as f64).collect()
}

fn decode_rsnr(cfg: &KpaConfig, dec: &Decoder, x: &Plaintext, y: &Ciphertext) -> Result<f64> {
    let r = dec.decode(
        &to_f64(&y.entries),
        StopRule::Sparsity(cfg.k),
        cfg.max_iter,
        Some(&to_f64(x.entries())),
    )?;
    Ok(r.rsnr_db.expect("reference supplied"))
}

/// Mean RSNR over the verification pairs.
fn verify_rsnr(cfg: &KpaConfig, s: &Setup, dec: &Decoder) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in s.x2.iter().zip(&s.y2) {
        total += decode_rsnr(cfg, dec, x, y)?;
    }
    Ok(total / s.x2.len() as f64)
}

/// RSNR on the known pair and on the verification pairs.
fn score(cfg: &KpaConfig, s: &Setup, a: &AntipodalMatrix) -> Result<(f64, f64)> {
    let dec = Decoder::antipodal(a, &s.basis)?;
    Ok((
        decode_rsnr(cfg, &dec, &s.x1, &s.y1)?,
        verify_rsnr(cfg, s, &dec)?,
    ))
}

pub fn run_kpa_experiment(cfg: &KpaConfig) -> Result<KpaOutcome> {
    cfg.validate()?;
    let s = setup(cfg)?;
    let bound = bound_for_bits(cfg.bits);
    let worst_c = s.row_flips.iter().copied().max().unwrap_or(0);
    let predicted = predicted_draws(cfg.attacker, cfg.n, bound, worst_c);
    if predicted.to_f64() > MAX_MEAN_DRAWS && !(cfg.greedy_repair && cfg.attacker == Attacker::Eve)
    {
        return Err(Error::BudgetExceeded(format!(
            "predicted {} draws per row exceeds {MAX_MEAN_DRAWS:e}; lower n or L",
            predicted
        )));
    }

    let records: Vec<KpaExperimentRecord> = (0..cfg.candidates)
        .into_par_iter()
        .map(|id| {
            let mut rows = Vec::with_capacity(cfg.m * cfg.n);
            let mut row_draws = Vec::with_capacity(cfg.m);
            for j in 0..cfg.m {
                let mut rng = derive_rng(cfg.master_seed, pair_stream(id as u64 + 1, j as u64));
                let y = s.y1.entries[j];
                let hit = match cfg.attacker {
                    Attacker::Eve if cfg.greedy_repair => {
                        eve_repair_row(&s.x1, y, &mut rng, cfg.max_draws_per_row)?
                    }
                    Attacker::Eve => eve_search_row(&s.x1, y, &mut rng, cfg.max_draws_per_row)?,
                    Attacker::Steve => steve_search_row(
                        &s.x1,
                        y,
                        s.a0.row(j),
                        s.row_flips[j],
                        &mut rng,
                        cfg.max_draws_per_row,
                    )?,
                };
                rows.extend_from_slice(&hit.row);
                row_draws.push(hit.draws);
            }
            let cand = AntipodalMatrix::from_signs(cfg.m, cfg.n, rows)?;
            if encode(&s.x1, &cand)?.entries != s.y1.entries {
                return Err(Error::Verification(format!(
                    "candidate {id} does not reproduce the known ciphertext"
                )));
            }
            let (rsnr1_db, rsnr2_db) = score(cfg, &s, &cand)?;
            Ok(KpaExperimentRecord {
                candidate_id: id,
                rsnr1_db,
                rsnr2_db,
                draws_total: row_draws.iter().sum(),
                row_draws,
                hamming_to_true: cand.hamming_distance(&s.a1),
            })
        })
        .collect::<Result<_>>()?;

    // control: the true matrix goes through the same verify-and-score path
    if encode(&s.x1, &s.a1)?.entries != s.y1.entries {
        return Err(Error::Verification(
            "true matrix fails the known pair".into(),
        ));
    }
    let (control_rsnr1_db, control_rsnr2_db) = score(cfg, &s, &s.a1)?;
    let nominal = verify_rsnr(cfg, &s, &Decoder::antipodal(&s.a0, &s.basis)?)?;
    let a1 = DMatrix::from_row_slice(cfg.m, cfg.n, &s.a1.to_f64());
    let mut first_class = 0.0;
    for (x, y) in s.x2.iter().zip(&s.y2) {
        let est = recover(
            &to_f64(&y.entries),
            &a1,
            &s.basis,
            StopRule::Sparsity(cfg.k),
            cfg.max_iter,
        )?;
        first_class += rsnr(&to_f64(x.entries()), &est.estimate)?;
    }
    let first_class_rsnr_db = first_class / s.x2.len() as f64;

    let r1: Vec<f64> = records.iter().map(|r| r.rsnr1_db).collect();
    let r2: Vec<f64> = records.iter().map(|r| r.rsnr2_db).collect();
    let (mean_rsnr1_db, std_rsnr1_db) = mean_std(&r1);
    let (mean_rsnr2_db, std_rsnr2_db) = mean_std(&r2);
    let draws: u64 = records.iter().map(|r| r.draws_total).sum();
    let summary = KpaSummary {
        config: cfg.clone(),
        version: VERSION.to_string(),
        candidates: records.len(),
        mean_rsnr1_db,
        std_rsnr1_db,
        mean_rsnr2_db,
        std_rsnr2_db,
        pearson_rho: pearson(&r1, &r2),
        nominal_second_class_rsnr_db: nominal,
        control_rsnr1_db,
        control_rsnr2_db,
        first_class_rsnr_db,
        mean_draws_per_row: draws as f64 / (records.len() * cfg.m) as f64,
        predicted_draws_per_row: predicted.to_f64(),
        flips_total: s.flips_total,
    };
    Ok(KpaOutcome { records, summary })
}
