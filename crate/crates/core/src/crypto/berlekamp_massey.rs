use super::lfsr::Lfsr;
use crate::{Error, Result};

/// Shortest linear recurrence generating a binary sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    /// Linear complexity `L`.
    pub complexity: usize,
    /// Connection polynomial `C(x) = 1 + c_1 x + ... + c_L x^L`, index = power.
    pub connection: Vec<bool>,
}

impl LinearRecurrence {
    /// Characteristic-polynomial taps (exponents of the reciprocal of `C`).
    pub fn taps(&self) -> Vec<u32> {
        let l = self.complexity;
        let mut taps: Vec<u32> = (1..=l)
            .filter(|&i| self.connection.get(i).copied().unwrap_or(false))
            .map(|i| (l - i) as u32)
            .filter(|&e| e > 0)
            .collect();
        taps.insert(0, l as u32);
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        taps
    }

    /// Register reproducing `prefix`, seeded with its first `L` bits.
    pub fn to_lfsr(&self, prefix: &[bool]) -> Result<Lfsr> {
        let l = self.complexity;
        if l == 0 {
            return Err(Error::Domain("sequence has linear complexity 0".into()));
        }
        if l > 64 {
            return Err(Error::Domain(format!("linear complexity {l} exceeds 64")));
        }
        if !self.connection.get(l).copied().unwrap_or(false) {
            return Err(Error::Domain(
                "singular recurrence (c_L = 0) has no plain register form".into(),
            ));
        }
        if prefix.len() < l {
            return Err(Error::DimensionMismatch {
                expected: l,
                actual: prefix.len(),
            });
        }
        let state = prefix[..l]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
        Lfsr::new(&self.taps(), state)
    }
}

/// Berlekamp-Massey over GF(2).
pub fn berlekamp_massey(bits: &[bool]) -> LinearRecurrence {
    let n = bits.len();
    let mut c = vec![false; n + 1];
    let mut b = vec![false; n + 1];
    c[0] = true;
    b[0] = true;
    let mut l = 0usize;
    let mut m = 1usize;

    for i in 0..n {
        let mut d = bits[i];
        for j in 1..=l {
            d ^= c[j] & bits[i - j];
        }
        if !d {
            m += 1;
            continue;
        }
        let prev = c.clone();
        for j in 0..=n - m {
            if b[j] {
                c[j + m] ^= true;
            }
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = prev;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(l + 1);
    LinearRecurrence {
        complexity: l,
        connection: c,
    }
}

/// Recovers the register behind an observed keystream prefix.
pub fn recover_lfsr(bits: &[bool]) -> Result<Lfsr> {
    berlekamp_massey(bits).to_lfsr(bits)
}
