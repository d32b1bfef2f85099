use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A nonnegative count stored as its base-2 logarithm.
///
/// Solution counts in this crate range from a handful to beyond 10^1229, so
/// every predictor reports one of these. Zero is represented by `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCount {
    log2: f64,
}

impl LogCount {
    pub const ZERO: LogCount = LogCount {
        log2: f64::NEG_INFINITY,
    };
    pub const ONE: LogCount = LogCount { log2: 0.0 };

    pub fn from_log2(log2: f64) -> Self {
        assert!(!log2.is_nan(), "log2 count is NaN");
        assert!(log2 != f64::INFINITY, "log2 count is +inf");
        LogCount { log2 }
    }

    pub fn from_ln(ln: f64) -> Self {
        Self::from_log2(ln / std::f64::consts::LN_2)
    }

    pub fn from_log10(log10: f64) -> Self {
        Self::from_log2(log10 / std::f64::consts::LOG10_2)
    }

    pub fn from_f64(value: f64) -> Self {
        assert!(value >= 0.0, "negative count {value}");
        Self::from_log2(value.log2())
    }

    /// Exact conversion from a big integer, keeping the 64 leading bits.
    pub fn from_biguint(value: &BigUint) -> Self {
        Self::from_log2(log2_biguint(value))
    }

    /// `num / den` for big integers.
    pub fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::ZERO;
        }
        Self::from_log2(log2_biguint(num) - log2_biguint(den))
    }

    pub fn log2(self) -> f64 {
        self.log2
    }

    pub fn log10(self) -> f64 {
        self.log2 * std::f64::consts::LOG10_2
    }

    pub fn ln(self) -> f64 {
        self.log2 * std::f64::consts::LN_2
    }

    pub fn is_zero(self) -> bool {
        self.log2 == f64::NEG_INFINITY
    }

    /// Linear value; saturates to `+inf` beyond the `f64` range.
    pub fn to_f64(self) -> f64 {
        self.log2.exp2()
    }

    pub fn powi(self, k: f64) -> LogCount {
        if self.is_zero() {
            return if k == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogCount::from_log2(self.log2 * k)
    }

    /// Decimal scientific form `(mantissa, exponent)` with `1 <= mantissa < 10`.
    pub fn decimal_parts(self) -> Option<(f64, i64)> {
        if self.is_zero() {
            return None;
        }
        let l10 = self.log10();
        let mut exponent = l10.floor();
        let mut mantissa = 10f64.powf(l10 - exponent);
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        Some((mantissa, exponent as i64))
    }

    /// Scientific string with `digits` digits after the point, e.g. `1.25e1229`.
    pub fn to_scientific(self, digits: usize) -> String {
        match self.decimal_parts() {
            None => "0".to_string(),
            Some((m, e)) => {
                let mut text = format!("{m:.digits$}");
                let mut e = e;
                // rounding can carry the mantissa to 10.00
                if text.starts_with("10") {
                    text = format!("{:.digits$}", m / 10.0);
                    e += 1;
                }
                format!("{text}e{e}")
            }
        }
    }
}

/// Sum in the linear domain.
impl Add for LogCount {
    type Output = LogCount;
    fn add(self, other: LogCount) -> LogCount {
        let (hi, lo) = if self.log2 >= other.log2 {
            (self.log2, other.log2)
        } else {
            (other.log2, self.log2)
        };
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogCount::from_log2(hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2)
    }
}

impl Mul for LogCount {
    type Output = LogCount;
    fn mul(self, rhs: LogCount) -> LogCount {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogCount::from_log2(self.log2 + rhs.log2)
    }
}

impl Div for LogCount {
    type Output = LogCount;
    fn div(self, rhs: LogCount) -> LogCount {
        assert!(!rhs.is_zero(), "division by a zero count");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogCount::from_log2(self.log2 - rhs.log2)
    }
}

impl PartialOrd for LogCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.log2.partial_cmp(&other.log2)
    }
}

impl fmt::Display for LogCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific(f.precision().unwrap_or(2)))
    }
}

impl From<&BigUint> for LogCount {
    fn from(value: &BigUint) -> Self {
        LogCount::from_biguint(value)
    }
}

impl From<u64> for LogCount {
    fn from(value: u64) -> Self {
        LogCount::from_f64(value as f64)
    }
}

pub(crate) fn log2_biguint(value: &BigUint) -> f64 {
    if value.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = value.bits();
    if bits <= 64 {
        return (value.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (value >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_one() {
        assert!(LogCount::ZERO.is_zero());
        assert_eq!(LogCount::ONE.to_f64(), 1.0);
        assert_eq!(LogCount::ZERO.to_string(), "0");
        assert_eq!((LogCount::ZERO * LogCount::ONE).to_f64(), 0.0);
    }

    #[test]
    fn add_in_linear_domain() {
        let a = LogCount::from_f64(3.0);
        let b = LogCount::from_f64(5.0);
        assert!(((a + b).to_f64() - 8.0).abs() < 1e-12);
        assert_eq!(a + LogCount::ZERO, a);
    }

    #[test]
    fn scientific_format() {
        let c = LogCount::from_log10(1229.0 + 1.25f64.log10());
        assert_eq!(c.to_scientific(2), "1.25e1229");
        let (m, e) = c.decimal_parts().unwrap();
        assert_eq!(e, 1229);
        assert!((m - 1.25).abs() < 1e-9);
        assert_eq!(LogCount::from_f64(9.999).to_scientific(2), "1.00e1");
    }

    #[test]
    fn biguint_log2() {
        let big = BigUint::from(1u8) << 4096usize;
        assert_eq!(LogCount::from_biguint(&big).log2(), 4096.0);
        let v = BigUint::from(12345u32);
        assert!((LogCount::from_biguint(&v).to_f64() - 12345.0).abs() < 1e-9);
        let r = LogCount::from_ratio(&BigUint::from(1u8), &BigUint::from(4u8));
        assert_eq!(r.log2(), -2.0);
    }

    #[test]
    fn long_chains_keep_precision() {
        // 10^4 additions of 1 must land on 10^4.
        let mut acc = LogCount::ZERO;
        for _ in 0..10_000 {
            acc = acc + LogCount::ONE;
        }
        let rel = (acc.to_f64() - 1e4).abs() / 1e4;
        assert!(rel < 2f64.powi(-12), "relative error {rel}");
    }
}
