use std::f64::consts::{LN_2, PI};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::quad::integrate;
use super::saddle::{ab_domain_contains, g_p, softplus_integral, solve_a, solve_ab};
use crate::ehrhart::{count_balanced_configs_upto, fit_ph_polynomial, MAX_HL};
use crate::{Error, LogCount, Result};

/// One point of a solution-count profile over the normalized target `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub tau: f64,
    pub count: LogCount,
    pub a: f64,
    pub b: Option<f64>,
}

/// Expected solutions of the eavesdropper's subset-sum at `tau = target / (n L)`.
pub fn s_eve_profile(tau: f64, n: usize, l: u64) -> Result<ProfileSample> {
    let a = solve_a(tau)?;
    let nf = n as f64;
    let lf = l as f64;
    let exponent = nf * (a * tau + softplus_integral(a, 0.0));
    let ln_s = exponent - 0.5 * (2.0 * PI * nf * lf * lf * g_p(2, a, 0.0)).ln();
    Ok(ProfileSample {
        tau,
        count: LogCount::from_ln(ln_s),
        a,
        b: None,
    })
}

/// Expected eavesdropper solution count averaged over targets:
/// `2^n / L * sqrt(3 / (pi n))`.
pub fn s_eve_expected(n: usize, l: u64) -> LogCount {
    let nf = n as f64;
    LogCount::from_log2(nf - (l as f64).log2() + 0.5 * (3.0 / (PI * nf)).log2())
}

/// Expected class-upgrade solution count at `tau = target / (n Q)`, `Q = 2L`,
/// for row density `r = c / n`.
pub fn s_steve_profile(tau: f64, n: usize, l: u64, r: f64) -> Result<ProfileSample> {
    let (a, b) = solve_ab(tau, r)?;
    let nf = n as f64;
    let det = g_p(0, a, b) * g_p(2, a, b) - g_p(1, a, b).powi(2);
    if det <= 0.0 {
        return Err(Error::NoConvergence(format!(
            "degenerate curvature at (tau, r) = ({tau}, {r})"
        )));
    }
    let ln_s = nf * (a * tau - b * r) + nf * softplus_integral(a, b)
        - (4.0 * PI * nf * l as f64 * det.sqrt()).ln();
    Ok(ProfileSample {
        tau,
        count: LogCount::from_ln(ln_s),
        a,
        b: Some(b),
    })
}

/// Expected class-upgrade solution count averaged over targets:
/// `sqrt(3/2) r^{-1-nr} (1-r)^{-1-n(1-r)} / (2 pi n L)`.
pub fn s_steve_expected(n: usize, l: u64, r: f64) -> Result<LogCount> {
    let nf = n as f64;
    if !(r > 0.0 && r < 1.0) || nf * r < 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "row density r = {r} needs 0 < r < 1 and n r >= 1"
        )));
    }
    let ln_s = 0.5 * 1.5f64.ln()
        - (1.0 + nf * r) * r.ln()
        - (1.0 + nf * (1.0 - r)) * (1.0 - r).ln()
        - (2.0 * PI * nf * l as f64).ln();
    Ok(LogCount::from_ln(ln_s))
}

/// `P_h(L)` for `h = 2..=hmax`: exact counts when the table fits the budget,
/// interpolated polynomials otherwise.
fn ph_values(hmax: usize, l: u64) -> Result<Vec<BigUint>> {
    if (hmax as u64).saturating_mul(l) <= MAX_HL {
        return count_balanced_configs_upto(hmax, l);
    }
    (2..=hmax)
        .map(|h| fit_ph_polynomial(h)?.eval_natural(l))
        .collect()
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(n - i) / BigUint::from(i + 1)
    })
}

/// `C(n, h) P_h(L) / (2L)^h` as an exact rational.
fn hamming_term(n: usize, l: u64, h: usize, ph: &BigUint) -> BigRational {
    let num = binomial(n, h) * ph;
    let den = BigUint::from(2 * l).pow(h as u32);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Expected eavesdropper solutions at Hamming distance exactly `h` from the
/// true one.
pub fn s_eve_hamming(n: usize, l: u64, h: usize) -> Result<LogCount> {
    if h < 2 || h > n {
        return Ok(LogCount::ZERO);
    }
    let ph = ph_values(h, l)?.pop().expect("h >= 2");
    Ok(ratio_to_log(&hamming_term(n, l, h, &ph)))
}

/// Expected eavesdropper solutions with Hamming distance in `2..=hmax`.
pub fn s_eve_hamming_cumulative(n: usize, l: u64, hmax: usize) -> Result<LogCount> {
    let hmax = hmax.min(n);
    if hmax < 2 {
        return Ok(LogCount::ZERO);
    }
    let ph = ph_values(hmax, l)?;
    let total = ph
        .iter()
        .enumerate()
        .map(|(i, p)| hamming_term(n, l, i + 2, p))
        .fold(BigRational::zero(), |acc, t| acc + t);
    Ok(ratio_to_log(&total))
}

fn ratio_to_log(q: &BigRational) -> LogCount {
    LogCount::from_ratio(q.numer().magnitude(), q.denom().magnitude())
}

/// Number of attack opportunities `T = log(zeta) / log(1 - 1/S)` after which
/// a random candidate is still wrong with probability at least `zeta`.
pub fn key_lifetime(s: LogCount, zeta: f64) -> Result<LogCount> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Domain(format!("zeta = {zeta} outside (0, 1)")));
    }
    if s.log2() <= 0.0 {
        return Err(Error::Domain("solution count must exceed 1".into()));
    }
    let neg_ln_zeta = -zeta.ln();
    let inv_s_log2 = -s.log2();
    if inv_s_log2 < (1e-15f64).log2() {
        // -log(1 - 1/S) = 1/S to double precision
        return Ok(LogCount::from_log2(s.log2() + neg_ln_zeta.log2()));
    }
    let inv_s = inv_s_log2.exp2();
    Ok(LogCount::from_f64(neg_ln_zeta / -(-inv_s).ln_1p()))
}

/// Probability that all of `t` independent guesses among `s` equally good
/// candidates miss the true one, `(1 - 1/S)^T`.
pub fn repeated_attack_failure(s: LogCount, t: LogCount) -> f64 {
    if s.log2() <= 0.0 {
        return 0.0;
    }
    // T log(1 - 1/S) ~ -T/S for large S
    let ln_miss = if s.log2() > 50.0 {
        -(t.log2() - s.log2()).exp2()
    } else {
        t.to_f64() * (-(-s.log2()).exp2()).ln_1p()
    };
    ln_miss.exp()
}

/// Least-squares fit of `ln S(tau) = c0 + c1 (tau - 1/4) + c2 (tau - 1/4)^2`
/// over `[lo, hi]`; returns the variance `-1 / (2 c2)` of the Gaussian shape.
pub fn fit_gaussian_variance(n: usize, l: u64, lo: f64, hi: f64, points: usize) -> Result<f64> {
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let tau = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let d = tau - 0.25;
        rows.push(([1.0, d, d * d], s_eve_profile(tau, n, l)?.count.ln()));
    }
    let x = nalgebra::DMatrix::from_fn(points, 3, |i, j| rows[i].0[j]);
    let y = nalgebra::DVector::from_iterator(points, rows.iter().map(|r| r.1));
    let c = x
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::NoConvergence(e.to_string()))?;
    if c[2] >= 0.0 {
        return Err(Error::NoConvergence("profile is not concave".into()));
    }
    Ok(-1.0 / (2.0 * c[2]))
}

/// `int S^2 dtau / int S dtau` over `tau in (0, 1/2)`, the expected count
/// when targets are drawn in proportion to their solution counts.
pub fn s_eve_tau_average(n: usize, l: u64) -> Result<LogCount> {
    let peak = s_eve_profile(0.25, n, l)?.count;
    let width = (1.0 / (12.0 * n as f64)).sqrt();
    let half = (12.0 * width).min(0.25 - 1e-6);
    let lo = 0.25 - half;
    // scaled profile S / S_peak; symmetric about 1/4
    let scaled = |tau: f64| -> f64 {
        match s_eve_profile(tau, n, l) {
            Ok(p) => ((p.count.log2() - peak.log2()) * LN_2).exp(),
            Err(_) => 0.0,
        }
    };
    let first = integrate(scaled, lo, 0.25, 1e-10);
    let second = integrate(|t| scaled(t).powi(2), lo, 0.25, 1e-10);
    Ok(LogCount::from_log2(peak.log2() + (second / first).log2()))
}

/// Class-upgrade analogue of [`s_eve_tau_average`] with `tau in (r^2/2, r - r^2/2)`.
pub fn s_steve_tau_average(n: usize, l: u64, r: f64) -> Result<LogCount> {
    let t0 = 0.5 * r;
    let peak = s_steve_profile(t0, n, l, r)?.count;
    let lo = 0.5 * r * r;
    let span = (t0 - lo) * (1.0 - 1e-6);
    let scaled = |tau: f64| -> f64 {
        if !ab_domain_contains(tau, r) {
            return 0.0;
        }
        match s_steve_profile(tau, n, l, r) {
            Ok(p) => ((p.count.log2() - peak.log2()) * LN_2).exp(),
            Err(_) => 0.0,
        }
    };
    let both = |f: &dyn Fn(f64) -> f64| {
        integrate(f, t0 - span, t0, 1e-10) + integrate(f, t0, t0 + span, 1e-10)
    };
    let first = both(&scaled);
    let second = both(&|t| scaled(t).powi(2));
    Ok(LogCount::from_log2(peak.log2() + (second / first).log2()))
}
