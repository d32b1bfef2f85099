//! Randomized search for matrix rows consistent with one known pair.

use rand::Rng;

use crate::crypto::{row_dot, Plaintext};
use crate::ssp::eve_reduction;
use crate::{Error, Result};

/// A row satisfying `row . x = y_j` and the number of draws spent finding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSearch {
    pub row: Vec<i8>,
    pub draws: u64,
}

/// Draws uniform antipodal rows until one satisfies `row . x = y_j`.
pub fn eve_search_row<R: Rng + ?Sized>(
    x: &Plaintext,
    y_j: i64,
    rng: &mut R,
    max_draws: u64,
) -> Result<RowSearch> {
    // rejects zero entries, wrong parity and out-of-range targets up front
    eve_reduction(x, y_j, None, 0)?;
    let xs = x.entries();
    let n = xs.len();
    let total: i64 = xs.iter().sum();
    let words = n.div_ceil(64);
    let mut bits = vec![0u64; words];
    for draw in 1..=max_draws {
        for w in bits.iter_mut() {
            *w = rng.random();
        }
        // row . x = 2 * sum_{b=1} x_l - sum x_l
        let mut pos = 0i64;
        for (wi, &w) in bits.iter().enumerate() {
            let mut m = if (wi + 1) * 64 > n {
                w & ((1u64 << (n - wi * 64)) - 1)
            } else {
                w
            };
            while m != 0 {
                pos += xs[wi * 64 + m.trailing_zeros() as usize];
                m &= m - 1;
            }
        }
        if 2 * pos - total == y_j {
            let row = (0..n)
                .map(|l| {
                    if bits[l / 64] >> (l % 64) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            return Ok(RowSearch { row, draws: draw });
        }
    }
    Err(Error::Exhausted { draws: max_draws })
}

/// Greedy repair: from a random row, flip the entry that brings the residual
/// closest to zero until it vanishes, restarting on a stall. Much faster than
/// rejection sampling but the output is not uniform over solutions; `draws`
/// counts restarts.
pub fn eve_repair_row<R: Rng + ?Sized>(
    x: &Plaintext,
    y_j: i64,
    rng: &mut R,
    max_draws: u64,
) -> Result<RowSearch> {
    eve_reduction(x, y_j, None, 0)?;
    let xs = x.entries();
    let n = xs.len();
    for draw in 1..=max_draws {
        let mut row: Vec<i8> = (0..n).map(|_| if rng.random() { 1 } else { -1 }).collect();
        let mut residual = y_j - row_dot(&row, xs);
        while residual != 0 {
            // flipping l adds -2 row_l x_l to row . x
            let (best, next) = (0..n)
                .map(|l| (l, residual + 2 * row[l] as i64 * xs[l]))
                .min_by_key(|&(_, r)| r.abs())
                .expect("n > 0");
            if next.abs() >= residual.abs() {
                break;
            }
            row[best] = -row[best];
            residual = next;
        }
        if residual == 0 {
            return Ok(RowSearch { row, draws: draw });
        }
    }
    Err(Error::Exhausted { draws: max_draws })
}

/// Draws uniform `c_j`-subsets of positions, flips them in `a0_row`, and
/// returns the first result satisfying `row . x = y_j`.
pub fn steve_search_row<R: Rng + ?Sized>(
    x: &Plaintext,
    y_j: i64,
    a0_row: &[i8],
    c_j: usize,
    rng: &mut R,
    max_draws: u64,
) -> Result<RowSearch> {
    x.require_nonzero()?;
    let xs = x.entries();
    let n = xs.len();
    if a0_row.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a0_row.len(),
        });
    }
    if c_j > n {
        return Err(Error::CardinalityMismatch {
            expected: n,
            actual: c_j,
        });
    }
    let residual = y_j - row_dot(a0_row, xs);
    if residual.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("eps_j = {residual} is odd")));
    }
    // flipping l adds -2 A0_l x_l, so the flipped set must sum to -eps/2.
    // Unlike the subset-sum reduction this tolerates A0_l x_l = L.
    let target = -residual / 2;
    if c_j == 0 {
        return if target == 0 {
            Ok(RowSearch {
                row: a0_row.to_vec(),
                draws: 1,
            })
        } else {
            Err(Error::Inconsistent(
                "no flips allowed but A0_j x != y_j".into(),
            ))
        };
    }
    let w: Vec<i64> = a0_row.iter().zip(xs).map(|(&a, &v)| a as i64 * v).collect();
    for draw in 1..=max_draws {
        let picks = rand::seq::index::sample(rng, n, c_j);
        let sum: i64 = picks.iter().map(|l| w[l]).sum();
        if sum == target {
            let mut row = a0_row.to_vec();
            for l in picks.iter() {
                row[l] = -row[l];
            }
            return Ok(RowSearch { row, draws: draw });
        }
    }
    Err(Error::Exhausted { draws: max_draws })
}
