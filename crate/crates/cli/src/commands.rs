use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cskpa_core::attack::{run_kpa_experiment, Attacker, FlipMode, KpaConfig};
use cskpa_core::crypto::{
    bound_for_bits, encode as encrypt, expand_matrix, recover_lfsr, KeyMaterial, Plaintext,
    DEFAULT_TAPS_32,
};
use cskpa_core::ehrhart::fit_ph_polynomial;
use cskpa_core::experiments::{eve_count_sweep, eve_hamming_sweep, steve_count_sweep};
use cskpa_core::io::{solution_rows, table_rows, CountReport, KpaRow};
use cskpa_core::predictor::{
    key_lifetime, s_eve_expected, s_eve_hamming, s_eve_hamming_cumulative, s_steve_expected,
};
use cskpa_core::recovery::{eta_sweep as run_eta_sweep, synth_sparse, EtaSweepConfig, SparseBasis};
use cskpa_core::seeds::derive_rng;
use cskpa_core::ssp::{
    count_gamma_solutions, count_solutions, enumerate_gamma_solutions, enumerate_solutions,
    eve_reduction, steve_reduction, InstanceJson,
};
use cskpa_core::{Error, Lfsr, LogCount, Result};

use crate::output::Output;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Inclusive integer range from `lo:hi` or `lo:hi:step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Range(Vec<usize>);

fn parse_range(text: &str) -> std::result::Result<Range, String> {
    let parts: Vec<usize> = text
        .split(':')
        .map(|p| p.trim().parse().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let (lo, hi, step) = match parts[..] {
        [lo, hi] => (lo, hi, 1),
        [lo, hi, step] if step > 0 => (lo, hi, step),
        _ => return Err(format!("expected lo:hi or lo:hi:step, got `{text}`")),
    };
    if lo > hi {
        return Err(format!("empty range `{text}`"));
    }
    Ok(Range((lo..=hi).step_by(step).collect()))
}

#[derive(Args, Serialize)]
pub struct EncodeArgs {
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    m: usize,
    /// Plaintext word length.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    /// Sparsity of the synthesized plaintext.
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Master seed for the synthesized plaintext.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Key material JSON `{seed_hex, taps, B_key}`; otherwise a default-tap key from `--key-seed`.
    #[arg(long)]
    key: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    key_seed: u64,
    /// Block index into the keystream.
    #[arg(long, default_value_t = 0)]
    t: u64,
    /// Plaintext JSON `{entries, bound}`; otherwise synthesized.
    #[arg(long)]
    plaintext: Option<PathBuf>,
}

#[derive(Serialize)]
struct Encoded {
    key: KeyMaterial,
    t: u64,
    plaintext: Plaintext,
    ciphertext: cskpa_core::Ciphertext,
}

pub fn encode(a: &EncodeArgs, out: &Output) -> Result<()> {
    let key = match &a.key {
        Some(p) => read_json(p)?,
        None => KeyMaterial::new(&DEFAULT_TAPS_32, a.key_seed)?,
    };
    let plaintext = match &a.plaintext {
        Some(p) => read_json(p)?,
        None => {
            let mut rng = derive_rng(a.seed, 0);
            synth_sparse(
                a.k,
                bound_for_bits(a.bits),
                &SparseBasis::dct(a.n),
                &mut rng,
            )?
            .x
        }
    };
    let matrix = expand_matrix(&key, a.m, plaintext.len(), a.t)?;
    let ciphertext = encrypt(&plaintext, &matrix)?;
    out.json(
        "encode",
        &Encoded {
            key,
            t: a.t,
            plaintext,
            ciphertext,
        },
    )
}

#[derive(Args, Serialize)]
pub struct KeystreamArgs {
    #[arg(long, default_value_t = 16)]
    degree: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Observed bits; defaults to twice the degree.
    #[arg(long)]
    observed: Option<usize>,
    /// Continuation bits compared after recovery.
    #[arg(long, default_value_t = 1000)]
    check: usize,
}

#[derive(Serialize)]
struct KeystreamReport {
    true_taps: Vec<u32>,
    recovered_taps: Vec<u32>,
    true_state: u64,
    recovered_state: u64,
    observed_bits: usize,
    continuation_bits: usize,
    continuation_matches: usize,
}

pub fn keystream_attack(a: &KeystreamArgs, out: &Output) -> Result<()> {
    if !(2..=63).contains(&a.degree) {
        return Err(Error::Config(format!("degree {} outside 2..=63", a.degree)));
    }
    let mut rng = derive_rng(a.seed, 0);
    let mut lfsr = Lfsr::random_maximal(a.degree, &mut rng);
    let (true_taps, true_state) = (lfsr.taps(), lfsr.state());
    let observed = a.observed.unwrap_or(2 * a.degree as usize);
    let stream = lfsr.take_bits(observed + a.check);
    let mut rec = recover_lfsr(&stream[..observed])?;
    let (recovered_taps, recovered_state) = (rec.taps(), rec.state());
    let replay = rec.take_bits(stream.len());
    let continuation_matches = replay[observed..]
        .iter()
        .zip(&stream[observed..])
        .filter(|(p, q)| p == q)
        .count();
    out.json(
        "keystream-attack",
        &KeystreamReport {
            true_taps,
            recovered_taps,
            true_state,
            recovered_state,
            observed_bits: observed,
            continuation_bits: a.check,
            continuation_matches,
        },
    )
}

#[derive(Args, Serialize)]
pub struct ReduceArgs {
    /// Plaintext entries.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    x: Vec<i64>,
    /// Ciphertext entry of the attacked row.
    #[arg(long, allow_hyphen_values = true)]
    y: i64,
    /// Plaintext bound L; defaults to max |x|.
    #[arg(long = "L")]
    bound: Option<i64>,
    /// Second-class row; selects the class-upgrade reduction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a0: Option<Vec<i8>>,
    /// Flips in the row for the class-upgrade reduction.
    #[arg(long, default_value_t = 0)]
    c: usize,
    /// True row, embedded as `b_true` when given.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a1: Option<Vec<i8>>,
}

pub fn reduce(a: &ReduceArgs, out: &Output) -> Result<()> {
    let bound = a
        .bound
        .unwrap_or_else(|| a.x.iter().map(|v| v.abs()).max().unwrap_or(1));
    let x = Plaintext::new(a.x.clone(), bound)?;
    let json = match &a.a0 {
        None => InstanceJson::from(&eve_reduction(&x, a.y, a.a1.as_deref(), 0)?),
        Some(a0) => InstanceJson::from(&steve_reduction(&x, a.y, a0, a.c, a.a1.as_deref(), 0)?),
    };
    out.json("reduce", &json)
}

#[derive(Args, Serialize)]
pub struct InstanceArgs {
    /// Instance JSON `{u, upsilon, gamma?, b_true?}`.
    input: PathBuf,
}

pub fn count(a: &InstanceArgs, _out: &Output) -> Result<()> {
    let json: InstanceJson = read_json(&a.input)?;
    let n: BigUint = match json.gamma {
        Some(_) => count_gamma_solutions(&json.to_gamma_instance()?)?,
        None => count_solutions(&json.to_instance()?)?,
    };
    println!("{n}");
    Ok(())
}

#[derive(Args, Serialize)]
pub struct EnumerateArgs {
    input: PathBuf,
    /// Largest solution set materialized.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
}

pub fn enumerate(a: &EnumerateArgs, out: &Output) -> Result<()> {
    let json: InstanceJson = read_json(&a.input)?;
    let (set, truth) = match json.gamma {
        Some(_) => {
            let inst = json.to_gamma_instance()?;
            (
                enumerate_gamma_solutions(&inst, a.budget)?,
                inst.base.true_mask(),
            )
        }
        None => {
            let inst = json.to_instance()?;
            (enumerate_solutions(&inst, a.budget)?, inst.true_mask())
        }
    };
    if !set.exact {
        return Err(Error::BudgetExceeded(format!(
            "{} solutions exceed the budget of {}",
            set.total, a.budget
        )));
    }
    out.csv("solutions", solution_rows(&set, truth))
}

#[derive(Args, Serialize, Deserialize, Default)]
pub struct PredictArgs {
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    n: usize,
    #[arg(long = "L", default_value_t = 0)]
    #[serde(rename = "L", default)]
    bound: u64,
    /// Row flip density; selects the class-upgrade count.
    #[arg(long)]
    r: Option<f64>,
    /// Exact Hamming distance from the true row.
    #[arg(long)]
    h: Option<usize>,
    /// Cumulative over Hamming distances 2..=hmax.
    #[arg(long)]
    hmax: Option<usize>,
    /// Confidence for the key lifetime.
    #[arg(long)]
    zeta: Option<f64>,
    /// JSON `{n, L, r?, h?, hmax?, zeta?}` instead of flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Serialize)]
struct Prediction {
    count: CountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    lifetime: Option<CountReport>,
}

pub fn predict(a: &PredictArgs, out: &Output) -> Result<()> {
    let loaded;
    let a = match &a.config {
        Some(p) => {
            loaded = read_json::<PredictArgs>(p)?;
            &loaded
        }
        None => a,
    };
    if a.n == 0 || a.bound == 0 {
        return Err(Error::Config("need n > 0 and L > 0".into()));
    }
    let count: LogCount = match (a.r, a.h, a.hmax) {
        (Some(r), None, None) => s_steve_expected(a.n, a.bound, r)?,
        (None, Some(h), None) => s_eve_hamming(a.n, a.bound, h)?,
        (None, None, Some(h)) => s_eve_hamming_cumulative(a.n, a.bound, h)?,
        (None, None, None) => s_eve_expected(a.n, a.bound),
        _ => return Err(Error::Config("use at most one of --r, --h, --hmax".into())),
    };
    let lifetime = a.zeta.map(|z| key_lifetime(count, z)).transpose()?;
    out.json(
        "predict",
        &Prediction {
            count: count.into(),
            lifetime: lifetime.map(Into::into),
        },
    )
}

#[derive(Args, Serialize)]
pub struct PhTableArgs {
    #[arg(long, default_value_t = 10)]
    hmax: usize,
}

pub fn ph_table(a: &PhTableArgs, out: &Output) -> Result<()> {
    if a.hmax < 2 {
        return Err(Error::Config("hmax must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for h in 2..=a.hmax {
        rows.extend(table_rows(h, &fit_ph_polynomial(h)?));
    }
    out.csv("ph_table", rows)
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum AttackerArg {
    Eve,
    Steve,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
enum FlipModeArg {
    Uniform,
    PerRow,
}

#[derive(Args, Serialize)]
pub struct AttackArgs {
    #[arg(long, value_enum, default_value = "eve")]
    attacker: AttackerArg,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    m: usize,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long, default_value_t = 0.03)]
    eta: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    flip_mode: FlipModeArg,
    #[arg(long, default_value_t = 500)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_draws: u64,
    /// Greedy row repair for the eavesdropper; fast, not uniform.
    #[arg(long)]
    greedy_repair: bool,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1)]
    verification_pairs: usize,
    /// Experiment JSON instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn attack(a: &AttackArgs, out: &Output) -> Result<()> {
    let cfg = match &a.config {
        Some(p) => read_json(p)?,
        None => KpaConfig {
            attacker: match a.attacker {
                AttackerArg::Eve => Attacker::Eve,
                AttackerArg::Steve => Attacker::Steve,
            },
            n: a.n,
            m: a.m,
            k: a.k,
            bits: a.bits,
            eta: a.eta,
            flip_mode: match a.flip_mode {
                FlipModeArg::Uniform => FlipMode::Uniform,
                FlipModeArg::PerRow => FlipMode::PerRow,
            },
            candidates: a.candidates,
            master_seed: a.seed,
            max_draws_per_row: a.max_draws,
            greedy_repair: a.greedy_repair,
            max_iter: a.max_iter,
            verification_pairs: a.verification_pairs,
        },
    };
    let outcome = run_kpa_experiment(&cfg)?;
    out.csv("attack", outcome.records.iter().map(KpaRow::from))?;
    out.summary("attack", &cfg, &outcome.summary)
}

#[derive(Args, Serialize)]
pub struct EtaSweepArgs {
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    m: usize,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 12)]
    bits: u32,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.005,0.01,0.02,0.03,0.05,0.1"
    )]
    etas: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn eta_sweep(a: &EtaSweepArgs, out: &Output) -> Result<()> {
    let cfg = match &a.config {
        Some(p) => read_json(p)?,
        None => EtaSweepConfig {
            n: a.n,
            m: a.m,
            k: a.k,
            bits: a.bits,
            etas: a.etas.clone(),
            seeds: a.seeds,
            master_seed: a.seed,
            max_iter: a.max_iter,
        },
    };
    let points = run_eta_sweep(&cfg)?;
    out.csv("eta_sweep", &points)?;
    out.summary("eta_sweep", &cfg, &points)
}

#[derive(Args, Serialize)]
pub struct Fig2Args {
    /// `lo:hi` or `lo:hi:step`.
    #[arg(long, value_parser = parse_range, default_value = "16:32:4")]
    n_range: Range,
    #[arg(long = "L", default_value_t = 10_000)]
    bound: u64,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn fig2(a: &Fig2Args, out: &Output) -> Result<()> {
    let points = eve_count_sweep(&a.n_range.0, a.bound, a.instances, a.seed)?;
    out.csv("fig2", &points)?;
    out.summary("fig2", a, &points)
}

#[derive(Args, Serialize)]
pub struct Fig3Args {
    #[arg(long, value_delimiter = ',', default_value = "21,25,29")]
    n_list: Vec<usize>,
    #[arg(long, value_parser = parse_range, default_value = "2:8")]
    h_range: Range,
    #[arg(long = "L", default_value_t = 10_000)]
    bound: u64,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn fig3(a: &Fig3Args, out: &Output) -> Result<()> {
    let points = eve_hamming_sweep(&a.n_list, a.bound, &a.h_range.0, a.instances, a.seed)?;
    out.csv("fig3", &points)?;
    out.summary("fig3", a, &points)
}

#[derive(Args, Serialize)]
pub struct Fig5Args {
    #[arg(long, value_delimiter = ',', default_value = "32,40,48")]
    n_list: Vec<usize>,
    /// Flips per row; the row density is `c / n`.
    #[arg(long, default_value_t = 5)]
    c: usize,
    #[arg(long = "L", default_value_t = 5_000)]
    bound: u64,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn fig5(a: &Fig5Args, out: &Output) -> Result<()> {
    let points = steve_count_sweep(&a.n_list, a.bound, |_| a.c, a.instances, a.seed)?;
    out.csv("fig5", &points)?;
    out.summary("fig5", a, &points)
}
