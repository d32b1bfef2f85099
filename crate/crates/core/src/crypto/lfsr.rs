//! Fibonacci linear-feedback shift registers over GF(2).
//!
//! A register of degree `B` is described by its characteristic polynomial
//! `p(x) = x^B + p_{B-1} x^{B-1} + ... + p_1 x + 1`. The emitted sequence obeys
//! `s[k+B] = sum_i p_i s[k+i]`. Taps are listed as the exponents of the nonzero
//! non-constant terms, so `x^4 + x + 1` has taps `[4, 1]`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maximal-length degree-32 polynomial `x^32 + x^22 + x^2 + x + 1`.
pub const DEFAULT_TAPS_32: [u32; 4] = [32, 22, 2, 1];

/// Anything that emits a reproducible bitstream.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;

    /// Next `k <= 64` bits, first emitted bit in the least significant position.
    fn next_bits(&mut self, k: u32) -> u64 {
        debug_assert!(k <= 64);
        let mut out = 0u64;
        for i in 0..k {
            if self.next_bit() {
                out |= 1 << i;
            }
        }
        out
    }

    /// Uniform integer in `0..bound` by rejection on `ceil(log2 bound)` bits.
    fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        if bound == 1 {
            return 0;
        }
        let width = 64 - (bound - 1).leading_zeros();
        loop {
            let v = self.next_bits(width);
            if v < bound {
                return v;
            }
        }
    }
}

/// Adapter exposing any `rand` generator as a [`BitSource`], for experiments
/// that need periods beyond what a small register offers.
pub struct RngBits<R> {
    rng: R,
    buffer: u64,
    left: u32,
}

impl<R: RngCore> RngBits<R> {
    pub fn new(rng: R) -> Self {
        RngBits {
            rng,
            buffer: 0,
            left: 0,
        }
    }
}

impl<R: RngCore> BitSource for RngBits<R> {
    fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.buffer = self.rng.next_u64();
            self.left = 64;
        }
        let bit = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.left -= 1;
        bit
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lfsr {
    degree: u32,
    /// Bit `i` holds `p_i` for `i < degree`; bit 0 is always set.
    feedback: u64,
    /// Bit `i` holds `s[k+i]`; bit 0 is the next output.
    state: u64,
    emitted: u64,
}

impl Lfsr {
    /// Builds a register from its taps and initial state (the first `degree`
    /// output bits, LSB first).
    pub fn new(taps: &[u32], state: u64) -> Result<Self> {
        let degree = taps.iter().copied().max().unwrap_or(0);
        if degree == 0 || degree > 64 {
            return Err(Error::Config(format!(
                "LFSR degree must be in 1..=64, got {degree}"
            )));
        }
        let mut feedback = 1u64;
        for &t in taps {
            if t == 0 {
                return Err(Error::Config("tap 0 is implicit".into()));
            }
            if t < degree {
                feedback |= 1 << t;
            }
        }
        let mask = state_mask(degree);
        Ok(Lfsr {
            degree,
            feedback,
            state: state & mask,
            emitted: 0,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn taps(&self) -> Vec<u32> {
        let mut taps = vec![self.degree];
        taps.extend(
            (1..self.degree)
                .rev()
                .filter(|&i| self.feedback >> i & 1 == 1),
        );
        taps
    }

    /// Period of a maximal-length register of this degree, `2^B - 1`.
    pub fn maximal_period(&self) -> u128 {
        (1u128 << self.degree) - 1
    }

    pub fn is_maximal_length(&self) -> bool {
        is_primitive(&self.taps())
    }

    pub fn step(&mut self) -> bool {
        let out = self.state & 1 == 1;
        let fb = (self.state & self.feedback).count_ones() & 1;
        self.state = (self.state >> 1) | ((fb as u64) << (self.degree - 1));
        self.emitted += 1;
        out
    }

    pub fn skip(&mut self, count: u128) {
        for _ in 0..count {
            self.step();
        }
    }

    pub fn take_bits(&mut self, count: usize) -> Vec<bool> {
        (0..count).map(|_| self.step()).collect()
    }

    /// Random maximal-length register of the given degree with a nonzero seed.
    pub fn random_maximal<R: Rng + ?Sized>(degree: u32, rng: &mut R) -> Self {
        assert!((2..=64).contains(&degree));
        loop {
            let middle: u64 = if degree > 1 {
                rng.random::<u64>() & state_mask(degree) & !1
            } else {
                0
            };
            let mut taps = vec![degree];
            taps.extend((1..degree).filter(|&i| middle >> i & 1 == 1));
            if is_primitive(&taps) {
                let seed = loop {
                    let s = rng.random::<u64>() & state_mask(degree);
                    if s != 0 {
                        break s;
                    }
                };
                return Lfsr::new(&taps, seed).expect("valid taps");
            }
        }
    }
}

impl BitSource for Lfsr {
    fn next_bit(&mut self) -> bool {
        self.step()
    }
}

fn state_mask(degree: u32) -> u64 {
    if degree == 64 {
        u64::MAX
    } else {
        (1u64 << degree) - 1
    }
}

/// Key material as exchanged in JSON: `{seed_hex, taps, B_key}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub seed_hex: String,
    pub taps: Vec<u32>,
    #[serde(rename = "B_key")]
    pub b_key: u32,
}

impl KeyMaterial {
    pub fn new(taps: &[u32], seed: u64) -> Result<Self> {
        let lfsr = Lfsr::new(taps, seed)?;
        if lfsr.state() == 0 {
            return Err(Error::Config("all-zero LFSR seed".into()));
        }
        Ok(KeyMaterial {
            seed_hex: format!("{:x}", lfsr.state()),
            taps: lfsr.taps(),
            b_key: lfsr.degree(),
        })
    }

    pub fn lfsr(&self) -> Result<Lfsr> {
        let seed = u64::from_str_radix(self.seed_hex.trim_start_matches("0x"), 16)
            .map_err(|e| Error::Config(format!("bad seed_hex: {e}")))?;
        let lfsr = Lfsr::new(&self.taps, seed)?;
        if lfsr.degree() != self.b_key {
            return Err(Error::Config(format!(
                "B_key {} disagrees with tap degree {}",
                self.b_key,
                lfsr.degree()
            )));
        }
        Ok(lfsr)
    }
}

// GF(2)[x] arithmetic on polynomials of degree < 128, used for the
// primitivity test.

fn clmul_mod(a: u128, b: u128, modulus: u128, degree: u32) -> u128 {
    let mut acc = 0u128;
    let mut a = a;
    let mut b = b;
    let top = 1u128 << degree;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn x_pow_mod(exp: u128, modulus: u128, degree: u32) -> u128 {
    let mut result = 1u128;
    let mut base = if degree == 1 { 2 ^ modulus } else { 2u128 };
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = clmul_mod(result, base, modulus, degree);
        }
        base = clmul_mod(base, base, modulus, degree);
        e >>= 1;
    }
    result
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// True when the characteristic polynomial given by `taps` (constant term
/// implied) is primitive, i.e. the register has period `2^B - 1`.
pub fn is_primitive(taps: &[u32]) -> bool {
    let degree = match taps.iter().copied().max() {
        Some(d) if (1..=64).contains(&d) => d,
        _ => return false,
    };
    let mut modulus = 1u128;
    for &t in taps {
        modulus |= 1u128 << t;
    }
    let order = (1u128 << degree) - 1;
    if x_pow_mod(order, modulus, degree) != 1 {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|q| x_pow_mod(order / q, modulus, degree) != 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree4_by_hand() {
        // x^4 + x + 1 from state s0..s3 = 1,0,0,1 (seed 0b1001):
        // s4 = s1 + s0 = 1, s5 = s2 + s1 = 0, s6 = s3 + s2 = 1, s7 = s4 + s3 = 0
        let mut lfsr = Lfsr::new(&[4, 1], 0b1001).unwrap();
        let bits = lfsr.take_bits(8);
        let expect = [true, false, false, true, true, false, true, false];
        assert_eq!(bits, expect);
        assert_eq!(lfsr.taps(), vec![4, 1]);
    }

    #[test]
    fn degree4_full_period() {
        let mut lfsr = Lfsr::new(&[4, 1], 1).unwrap();
        let start = lfsr.state();
        let mut period = 0;
        loop {
            lfsr.step();
            period += 1;
            if lfsr.state() == start {
                break;
            }
        }
        assert_eq!(period, 15);
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&[4, 1]));
        assert!(!is_primitive(&[4, 2]));
        // x^4 + x^3 + x^2 + x + 1 is irreducible with order 5
        assert!(!is_primitive(&[4, 3, 2, 1]));
        assert!(is_primitive(&DEFAULT_TAPS_32));
        assert!(is_primitive(&[64, 63, 61, 60]));
    }

    #[test]
    fn brute_force_period_matches_primitivity() {
        for degree in 2..=10u32 {
            for middle in 0..(1u64 << (degree - 1)) {
                let mut taps = vec![degree];
                taps.extend((1..degree).filter(|&i| (middle << 1) >> i & 1 == 1));
                let mut lfsr = Lfsr::new(&taps, 1).unwrap();
                let mut period = 0u64;
                loop {
                    lfsr.step();
                    period += 1;
                    if lfsr.state() == 1 || period > (1 << degree) {
                        break;
                    }
                }
                let maximal = lfsr.state() == 1 && period == (1 << degree) - 1;
                assert_eq!(maximal, is_primitive(&taps), "taps {taps:?}");
            }
        }
    }

    #[test]
    fn key_json_round_trip() {
        let key = KeyMaterial::new(&DEFAULT_TAPS_32, 0xdead_beef).unwrap();
        let text = serde_json::to_string(&key).unwrap();
        assert!(text.contains("\"B_key\":32"));
        let back: KeyMaterial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, key);
        assert_eq!(back.lfsr().unwrap().state(), 0xdead_beef);
    }

    #[test]
    fn below_is_in_range() {
        let mut lfsr = Lfsr::new(&DEFAULT_TAPS_32, 7).unwrap();
        for bound in 1..50 {
            assert!(lfsr.next_below(bound) < bound);
        }
    }
}
