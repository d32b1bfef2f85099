//! Exact counts of balanced weight/bit configurations and the polynomials in
//! `L` that interpolate them.
//!
//! `P_h(L)` counts pairs `(u, b)` with `u in {1..L}^h`, `b in {0,1}^h` and
//! `sum_{b_l = 0} u_l = sum_{b_l = 1} u_l`. Patterns with `k` zeros contribute
//! `sum_s N_k(s) N_{h-k}(s)`, where `N_j(s)` counts compositions of `s` into
//! `j` parts from `{1..L}`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::{Error, Result};

/// Largest `h * L` for which configurations are counted.
pub const MAX_HL: u64 = 1_000_000;

/// Polynomial with exact rational coefficients; `coeffs[j]` multiplies `L^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `L^j`.
    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: u64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(x)))
    }

    /// Value at `x` as a natural number; errors if it is not one.
    pub fn eval_natural(&self, x: u64) -> Result<BigUint> {
        let v = self.eval_int(x);
        if !v.is_integer() || v.is_negative() {
            return Err(Error::Verification(format!(
                "polynomial value {v} at {x} is not a natural number"
            )));
        }
        Ok(v.to_integer().magnitude().clone())
    }

    fn mul_linear(&self, root: &BigRational) -> RationalPolynomial {
        // (x - root) * self
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j + 1] += c;
            out[j] -= c * root;
        }
        RationalPolynomial::new(out)
    }

    fn scale(&self, k: &BigRational) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    fn add(&self, other: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        RationalPolynomial::new((0..len).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    fn shift_up(&self) -> RationalPolynomial {
        let mut c = vec![BigRational::zero()];
        c.extend(self.coeffs.iter().cloned());
        RationalPolynomial::new(c)
    }

    /// Unique polynomial of degree `< points.len()` through `points`.
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> RationalPolynomial {
        let mut acc = RationalPolynomial::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = RationalPolynomial::new(vec![BigRational::one()]);
            let mut denom = BigRational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul_linear(xj);
                    denom *= xi - xj;
                }
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }

    /// `(j, numerator, denominator)` for every nonzero coefficient.
    pub fn table_rows(&self) -> Vec<(usize, BigInt, BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.numer().clone(), c.denom().clone()))
            .collect()
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            write!(f, "{}", c.abs())?;
            match j {
                0 => {}
                1 => f.write_str(" L")?,
                _ => write!(f, " L^{j}")?,
            }
        }
        Ok(())
    }
}

/// `N_j(s)` for `j = 0..=jmax`; row `j` is indexed by `s = 0..=j L`.
fn composition_tables(jmax: usize, l: usize) -> Vec<Vec<BigUint>> {
    let mut tables = vec![vec![BigUint::one()]];
    for j in 1..=jmax {
        let prev = &tables[j - 1];
        let mut prefix = Vec::with_capacity(prev.len() + 1);
        prefix.push(BigUint::zero());
        for v in prev {
            let next = prefix.last().unwrap() + v;
            prefix.push(next);
        }
        let len = j * l + 1;
        let row: Vec<BigUint> = (0..len)
            .map(|s| {
                // sum of prev[t] for t in s-L ..= s-1
                if s == 0 {
                    return BigUint::zero();
                }
                let hi = (s - 1).min(prev.len() - 1);
                let lo = s.saturating_sub(l);
                if lo > hi {
                    BigUint::zero()
                } else {
                    &prefix[hi + 1] - &prefix[lo]
                }
            })
            .collect();
        tables.push(row);
    }
    tables
}

fn check_budget(h: usize, l: u64) -> Result<()> {
    if h < 2 {
        return Err(Error::Domain(format!("h = {h} must be at least 2")));
    }
    if l == 0 {
        return Err(Error::Domain("L must be positive".into()));
    }
    if (h as u64).saturating_mul(l) > MAX_HL {
        return Err(Error::BudgetExceeded(format!(
            "h L = {} exceeds {MAX_HL}",
            h as u64 * l
        )));
    }
    Ok(())
}

/// `P_h(L)`, counted exactly.
pub fn count_balanced_configs(h: usize, l: u64) -> Result<BigUint> {
    check_budget(h, l)?;
    let n = composition_tables(h - 1, l as usize);
    Ok(balanced_from_tables(&n, h))
}

/// `P_h(L)` for every `h = 2..=hmax`, sharing one set of composition tables.
pub fn count_balanced_configs_upto(hmax: usize, l: u64) -> Result<Vec<BigUint>> {
    check_budget(hmax, l)?;
    let n = composition_tables(hmax - 1, l as usize);
    Ok((2..=hmax)
        .into_par_iter()
        .map(|h| balanced_from_tables(&n, h))
        .collect())
}

fn balanced_from_tables(n: &[Vec<BigUint>], h: usize) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for k in 1..h {
        // binom = C(h, k)
        binom = binom * BigUint::from(h - k + 1) / BigUint::from(k);
        total += &binom * pair_sum(&n[k], &n[h - k]);
    }
    total
}

fn pair_sum(a: &[BigUint], b: &[BigUint]) -> BigUint {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `P_h` interpolated through `L = h..=2h-2` with zero constant term, then
/// checked against exact counts at `L = 2h-1` and `L = 2h`.
pub fn fit_ph_polynomial(h: usize) -> Result<RationalPolynomial> {
    if h < 2 {
        return Err(Error::Domain(format!("h = {h} must be at least 2")));
    }
    let top = 2 * h as u64;
    let counts: Vec<BigUint> = (h as u64..=top)
        .into_par_iter()
        .map(|l| count_balanced_configs(h, l))
        .collect::<Result<_>>()?;
    let nodes: Vec<(BigRational, BigRational)> = (h as u64..=2 * h as u64 - 2)
        .zip(&counts)
        .map(|(l, c)| {
            let l = BigInt::from(l);
            (
                BigRational::from_integer(l.clone()),
                BigRational::new(BigInt::from(c.clone()), l),
            )
        })
        .collect();
    let poly = RationalPolynomial::interpolate(&nodes).shift_up();
    for (l, c) in (h as u64..=top).zip(&counts).skip(h - 1) {
        verify_at(&poly, h, l, c)?;
    }
    Ok(poly)
}

/// Checks `poly(L)` against `count_balanced_configs(h, L)`.
pub fn verify_polynomial(poly: &RationalPolynomial, h: usize, l: u64) -> Result<()> {
    let c = count_balanced_configs(h, l)?;
    verify_at(poly, h, l, &c)
}

fn verify_at(poly: &RationalPolynomial, h: usize, l: u64, count: &BigUint) -> Result<()> {
    let v = poly.eval_int(l);
    if v != BigRational::from_integer(BigInt::from(count.clone())) {
        return Err(Error::Verification(format!(
            "P_{h}({l}): polynomial gives {v}, counting gives {count}"
        )));
    }
    Ok(())
}

/// Least common multiple of the coefficient denominators.
pub fn common_denominator(poly: &RationalPolynomial) -> BigInt {
    poly.coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}
