//! Meet-in-the-middle enumeration of subset-sum solutions.

use super::instance::{mask_to_bits, GammaSspInstance, SspInstance};
use crate::{Error, LogCount, Result};

/// Largest instance size the enumerator accepts.
pub const MAX_ENUM_N: usize = 48;

/// Solutions as bit masks (bit `l` = `b_l`), sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub n: usize,
    pub members: Vec<u64>,
    /// False when the budget cut enumeration short.
    pub exact: bool,
    /// Total number of solutions, known even when truncated.
    pub total: u64,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn count(&self) -> LogCount {
        LogCount::from(self.total)
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn bits(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        self.members.iter().map(move |&m| mask_to_bits(m, self.n))
    }
}

pub fn enumerate_solutions(inst: &SspInstance, budget: usize) -> Result<SolutionSet> {
    enumerate(&inst.weights, inst.target, None, budget)
}

pub fn enumerate_gamma_solutions(inst: &GammaSspInstance, budget: usize) -> Result<SolutionSet> {
    enumerate(
        &inst.base.weights,
        inst.base.target,
        Some(inst.cardinality),
        budget,
    )
}

/// Count of solutions without materializing them.
pub fn count_mitm(weights: &[u64], target: u64, cardinality: Option<usize>) -> Result<u64> {
    Ok(enumerate(weights, target, cardinality, 0)?.total)
}

struct Half {
    /// `(sum, mask)` sorted by sum.
    entries: Vec<(u64, u32)>,
    /// Start offsets of equal-sum groups, plus a final sentinel.
    groups: Vec<usize>,
}

impl Half {
    fn build(weights: &[u64]) -> Half {
        let k = weights.len();
        let mut sums = vec![0u64; 1 << k];
        for (i, &w) in weights.iter().enumerate() {
            let bit = 1usize << i;
            for m in 0..bit {
                sums[m | bit] = sums[m] + w;
            }
        }
        let mut entries: Vec<(u64, u32)> = sums
            .into_iter()
            .enumerate()
            .map(|(m, s)| (s, m as u32))
            .collect();
        entries.sort_unstable();
        let mut groups = vec![0];
        for i in 1..entries.len() {
            if entries[i].0 != entries[i - 1].0 {
                groups.push(i);
            }
        }
        groups.push(entries.len());
        Half { entries, groups }
    }

    fn group_count(&self) -> usize {
        self.groups.len() - 1
    }

    fn group(&self, g: usize) -> &[(u64, u32)] {
        &self.entries[self.groups[g]..self.groups[g + 1]]
    }
}

fn enumerate(
    weights: &[u64],
    target: u64,
    cardinality: Option<usize>,
    budget: usize,
) -> Result<SolutionSet> {
    let n = weights.len();
    if n > MAX_ENUM_N {
        return Err(Error::BudgetExceeded(format!(
            "enumeration supports n <= {MAX_ENUM_N}, got {n}"
        )));
    }
    let split = n / 2;
    let left = Half::build(&weights[..split]);
    let right = Half::build(&weights[split..]);

    let mut pairs = Vec::new();
    let mut rg = right.group_count();
    for lg in 0..left.group_count() {
        let lsum = left.group(lg)[0].0;
        if lsum > target {
            break;
        }
        let need = target - lsum;
        while rg > 0 && right.group(rg - 1)[0].0 > need {
            rg -= 1;
        }
        if rg > 0 && right.group(rg - 1)[0].0 == need {
            pairs.push((lg, rg - 1));
        }
    }

    let mut total = 0u64;
    for &(lg, rg) in &pairs {
        let (l, r) = (left.group(lg), right.group(rg));
        total += match cardinality {
            None => (l.len() * r.len()) as u64,
            Some(c) => {
                let hist = popcount_hist(r);
                l.iter()
                    .filter_map(|&(_, m)| c.checked_sub(m.count_ones() as usize))
                    .map(|need| hist.get(need).copied().unwrap_or(0))
                    .sum()
            }
        };
    }

    let mut members = Vec::with_capacity(total.min(budget as u64) as usize);
    'outer: for &(lg, rg) in &pairs {
        for &(_, lm) in left.group(lg) {
            for &(_, rm) in right.group(rg) {
                if let Some(c) = cardinality {
                    if (lm.count_ones() + rm.count_ones()) as usize != c {
                        continue;
                    }
                }
                if members.len() >= budget {
                    break 'outer;
                }
                members.push(lm as u64 | (rm as u64) << split);
            }
        }
    }
    members.sort_unstable();
    Ok(SolutionSet {
        n,
        exact: members.len() as u64 == total,
        members,
        total,
    })
}

fn popcount_hist(group: &[(u64, u32)]) -> Vec<u64> {
    let mut hist = vec![0u64; 33];
    for &(_, m) in group {
        hist[m.count_ones() as usize] += 1;
    }
    hist
}
