use serde::{Deserialize, Serialize};

use super::mitm::SolutionSet;
use crate::{Error, Result};

/// Number of solutions at each Hamming distance from a reference solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HammingHistogram {
    /// `counts[h]` for `h = 0..=n`.
    pub counts: Vec<u64>,
}

impl HammingHistogram {
    pub fn at(&self, h: usize) -> u64 {
        self.counts.get(h).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Solutions with distance in `lo..=hi`.
    pub fn range_sum(&self, lo: usize, hi: usize) -> u64 {
        (lo..=hi.min(self.counts.len().saturating_sub(1)))
            .map(|h| self.counts[h])
            .sum()
    }
}

pub fn hamming_histogram(set: &SolutionSet, reference: u64) -> Result<HammingHistogram> {
    if !set.exact {
        return Err(Error::Domain(
            "histogram of a truncated solution set".into(),
        ));
    }
    let mut counts = vec![0u64; set.n + 1];
    for &m in &set.members {
        counts[(m ^ reference).count_ones() as usize] += 1;
    }
    Ok(HammingHistogram { counts })
}
