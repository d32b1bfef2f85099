use serde::{Deserialize, Serialize};

use crate::crypto::{row_dot, Plaintext};
use crate::{Error, Result};

/// How a solution bit vector maps back to a candidate matrix row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackMap {
    /// `A_l = sign(x_l) (2 b_l - 1)`.
    Eavesdropper { signs: Vec<i8> },
    /// `A_l = A0_l (1 - 2 b_l)`.
    ClassUpgrade { a0_row: Vec<i8> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub row: usize,
    pub back_map: BackMap,
}

/// `sum_l b_l u_l = target` over binary `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SspInstance {
    pub weights: Vec<u64>,
    pub target: u64,
    pub true_solution: Option<Vec<bool>>,
    pub provenance: Option<Provenance>,
}

/// Subset-sum with the extra constraint `sum_l b_l = cardinality`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSspInstance {
    pub base: SspInstance,
    pub cardinality: usize,
    /// `Q = 2L`, the largest admissible weight.
    pub weight_bound: u64,
}

impl SspInstance {
    pub fn new(weights: Vec<u64>, target: u64) -> Result<Self> {
        if let Some(index) = weights.iter().position(|&w| w == 0) {
            return Err(Error::ZeroWeight { index });
        }
        Ok(SspInstance {
            weights,
            target,
            true_solution: None,
            provenance: None,
        })
    }

    pub fn with_true_solution(mut self, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: bits.len(),
            });
        }
        if !self.verify(&bits) {
            return Err(Error::Inconsistent(
                "true solution does not reach the target".into(),
            ));
        }
        self.true_solution = Some(bits);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight_sum(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// Density `n / log2 L` with `L` the largest weight.
    pub fn density(&self) -> f64 {
        let max = self.weights.iter().copied().max().unwrap_or(1).max(2);
        self.len() as f64 / (max as f64).log2()
    }

    pub fn subset_sum(&self, bits: &[bool]) -> u64 {
        self.weights
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(w, _)| w)
            .sum()
    }

    pub fn verify(&self, bits: &[bool]) -> bool {
        bits.len() == self.weights.len() && self.subset_sum(bits) == self.target
    }

    /// `verify` for a bit mask (bit `l` = `b_l`), `n <= 64`.
    pub fn verify_mask(&self, mask: u64) -> bool {
        self.mask_sum(mask) == self.target
    }

    pub(crate) fn mask_sum(&self, mask: u64) -> u64 {
        let mut m = mask;
        let mut sum = 0;
        while m != 0 {
            let l = m.trailing_zeros() as usize;
            sum += self.weights[l];
            m &= m - 1;
        }
        sum
    }

    pub fn true_mask(&self) -> Option<u64> {
        self.true_solution.as_ref().map(|b| bits_to_mask(b))
    }

    /// Candidate matrix row for a solution.
    pub fn back_map(&self, bits: &[bool]) -> Result<Vec<i8>> {
        let prov = self
            .provenance
            .as_ref()
            .ok_or_else(|| Error::Config("instance carries no back-map".into()))?;
        if bits.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: bits.len(),
            });
        }
        Ok(match &prov.back_map {
            BackMap::Eavesdropper { signs } => signs
                .iter()
                .zip(bits)
                .map(|(&s, &b)| if b { s } else { -s })
                .collect(),
            BackMap::ClassUpgrade { a0_row } => a0_row
                .iter()
                .zip(bits)
                .map(|(&a, &b)| if b { -a } else { a })
                .collect(),
        })
    }
}

impl GammaSspInstance {
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn verify(&self, bits: &[bool]) -> bool {
        self.base.verify(bits) && bits.iter().filter(|&&b| b).count() == self.cardinality
    }

    pub fn verify_mask(&self, mask: u64) -> bool {
        mask.count_ones() as usize == self.cardinality && self.base.verify_mask(mask)
    }

    /// Row density `r = c_j / n`.
    pub fn row_density(&self) -> f64 {
        self.cardinality as f64 / self.len() as f64
    }
}

pub fn bits_to_mask(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64, "bit masks hold at most 64 entries");
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)
}

pub fn mask_to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Reduces the eavesdropper's attack on row `j` to a subset-sum problem:
/// `u_l = |x_l|`, `target = (y_j + sum |x_l|) / 2`.
pub fn eve_reduction(
    x: &Plaintext,
    y_j: i64,
    a1_row: Option<&[i8]>,
    row: usize,
) -> Result<SspInstance> {
    x.require_nonzero()?;
    let abs_sum = x.abs_sum();
    if y_j.abs() > abs_sum {
        return Err(Error::Inconsistent(format!(
            "|y_j| = {} exceeds sum |x_l| = {abs_sum}",
            y_j.abs()
        )));
    }
    if (y_j + abs_sum).rem_euclid(2) != 0 {
        return Err(Error::Parity(format!(
            "y_j + sum |x_l| = {} is odd",
            y_j + abs_sum
        )));
    }
    let weights = x.entries().iter().map(|v| v.unsigned_abs()).collect();
    let signs: Vec<i8> = x.entries().iter().map(|&v| v.signum() as i8).collect();
    let mut inst = SspInstance {
        weights,
        target: ((y_j + abs_sum) / 2) as u64,
        true_solution: None,
        provenance: Some(Provenance {
            row,
            back_map: BackMap::Eavesdropper {
                signs: signs.clone(),
            },
        }),
    };
    if let Some(a1) = a1_row {
        check_len(a1, x.len())?;
        if row_dot(a1, x.entries()) != y_j {
            return Err(Error::Inconsistent("A1_j x != y_j".into()));
        }
        let bits = a1.iter().zip(&signs).map(|(&a, &s)| a * s == 1).collect();
        inst = inst.with_true_solution(bits)?;
    }
    Ok(inst)
}

/// Reduces the class-upgrade attack on row `j` to a cardinality-constrained
/// subset-sum problem: `u_l = L - A0_l x_l`, `target = eps_j / 2 + L c_j`,
/// cardinality `c_j`, with `eps_j = y_j - A0_j x`.
pub fn steve_reduction(
    x: &Plaintext,
    y_j: i64,
    a0_row: &[i8],
    flips_in_row: usize,
    a1_row: Option<&[i8]>,
    row: usize,
) -> Result<GammaSspInstance> {
    x.require_nonzero()?;
    check_len(a0_row, x.len())?;
    let bound = x.bound();
    let mut weights = Vec::with_capacity(x.len());
    for (index, (&a, &v)) in a0_row.iter().zip(x.entries()).enumerate() {
        let w = bound - a as i64 * v;
        if w == 0 {
            return Err(Error::ZeroWeight { index });
        }
        weights.push(w as u64);
    }
    let residual = y_j - row_dot(a0_row, x.entries());
    if residual.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("eps_j = {residual} is odd")));
    }
    let target = residual / 2 + bound * flips_in_row as i64;
    if target < 0 || flips_in_row > x.len() {
        return Err(Error::Inconsistent(format!(
            "target {target} unreachable with {flips_in_row} flips"
        )));
    }
    let mut base = SspInstance {
        weights,
        target: target as u64,
        true_solution: None,
        provenance: Some(Provenance {
            row,
            back_map: BackMap::ClassUpgrade {
                a0_row: a0_row.to_vec(),
            },
        }),
    };
    if let Some(a1) = a1_row {
        check_len(a1, x.len())?;
        let bits: Vec<bool> = a1.iter().zip(a0_row).map(|(a, b)| a != b).collect();
        let flips = bits.iter().filter(|&&b| b).count();
        if flips != flips_in_row {
            return Err(Error::CardinalityMismatch {
                expected: flips_in_row,
                actual: flips,
            });
        }
        if row_dot(a1, x.entries()) != y_j {
            return Err(Error::Inconsistent("A1_j x != y_j".into()));
        }
        base = base.with_true_solution(bits)?;
    }
    Ok(GammaSspInstance {
        base,
        cardinality: flips_in_row,
        weight_bound: 2 * bound as u64,
    })
}

fn check_len(row: &[i8], n: usize) -> Result<()> {
    if row.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    Ok(())
}

/// JSON form `{u[], upsilon, gamma?, b_true[]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub u: Vec<u64>,
    pub upsilon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_true: Option<Vec<u8>>,
}

impl From<&SspInstance> for InstanceJson {
    fn from(inst: &SspInstance) -> Self {
        InstanceJson {
            u: inst.weights.clone(),
            upsilon: inst.target,
            gamma: None,
            b_true: inst
                .true_solution
                .as_ref()
                .map(|b| b.iter().map(|&v| v as u8).collect()),
        }
    }
}

impl From<&GammaSspInstance> for InstanceJson {
    fn from(inst: &GammaSspInstance) -> Self {
        InstanceJson {
            gamma: Some(inst.cardinality),
            ..InstanceJson::from(&inst.base)
        }
    }
}

impl InstanceJson {
    pub fn to_instance(&self) -> Result<SspInstance> {
        let inst = SspInstance::new(self.u.clone(), self.upsilon)?;
        match &self.b_true {
            Some(bits) => inst.with_true_solution(bits.iter().map(|&b| b != 0).collect()),
            None => Ok(inst),
        }
    }

    pub fn to_gamma_instance(&self) -> Result<GammaSspInstance> {
        let gamma = self
            .gamma
            .ok_or_else(|| Error::Config("instance has no gamma".into()))?;
        let base = self.to_instance()?;
        if let Some(bits) = &base.true_solution {
            let ones = bits.iter().filter(|&&b| b).count();
            if ones != gamma {
                return Err(Error::CardinalityMismatch {
                    expected: gamma,
                    actual: ones,
                });
            }
        }
        let weight_bound = base.weights.iter().copied().max().unwrap_or(0);
        Ok(GammaSspInstance {
            base,
            cardinality: gamma,
            weight_bound,
        })
    }
}
