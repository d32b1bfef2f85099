//! Exact solution counting by dynamic programming over reachable sums.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::instance::{GammaSspInstance, SspInstance};
use crate::{Error, Result};

/// Largest DP table (in cells) attempted before refusing.
pub const MAX_DP_CELLS: u64 = 100_000_000;

trait Cell: Zero + One + Clone + for<'a> AddAssign<&'a Self> + Into<BigUint> {}
impl<T> Cell for T where T: Zero + One + Clone + for<'a> AddAssign<&'a T> + Into<BigUint> {}

/// Number of binary `b` with `sum b_l u_l = target`.
pub fn count_solutions(inst: &SspInstance) -> Result<BigUint> {
    count_with_budget(&inst.weights, inst.target, MAX_DP_CELLS)
}

/// Number of binary `b` with `sum b_l u_l = target` and `sum b_l = cardinality`.
pub fn count_gamma_solutions(inst: &GammaSspInstance) -> Result<BigUint> {
    count_gamma_with_budget(
        &inst.base.weights,
        inst.base.target,
        inst.cardinality,
        MAX_DP_CELLS,
    )
}

pub fn count_with_budget(weights: &[u64], target: u64, max_cells: u64) -> Result<BigUint> {
    let total: u64 = weights.iter().sum();
    if target > total {
        return Ok(BigUint::zero());
    }
    // b -> 1 - b maps solutions at `target` to solutions at `total - target`
    let t = target.min(total - target);
    if t + 1 > max_cells {
        return Err(Error::BudgetExceeded(format!(
            "DP table of {} cells exceeds {max_cells}",
            t + 1
        )));
    }
    let t = t as usize;
    Ok(match weights.len() {
        0..=63 => subset_dp::<u64>(weights, t).into(),
        64..=127 => subset_dp::<u128>(weights, t).into(),
        _ => subset_dp::<BigUint>(weights, t),
    })
}

pub fn count_gamma_with_budget(
    weights: &[u64],
    target: u64,
    cardinality: usize,
    max_cells: u64,
) -> Result<BigUint> {
    let n = weights.len();
    let total: u64 = weights.iter().sum();
    if target > total || cardinality > n {
        return Ok(BigUint::zero());
    }
    let direct = (target, cardinality);
    let mirrored = (total - target, n - cardinality);
    let cells = |(t, g): (u64, usize)| (t + 1).saturating_mul(g as u64 + 1);
    let (t, g) = if cells(mirrored) < cells(direct) {
        mirrored
    } else {
        direct
    };
    if cells((t, g)) > max_cells {
        return Err(Error::BudgetExceeded(format!(
            "DP table of {} cells exceeds {max_cells}",
            cells((t, g))
        )));
    }
    let t = t as usize;
    Ok(match n {
        0..=63 => gamma_dp::<u64>(weights, t, g).into(),
        64..=127 => gamma_dp::<u128>(weights, t, g).into(),
        _ => gamma_dp::<BigUint>(weights, t, g),
    })
}

fn subset_dp<C: Cell>(weights: &[u64], t: usize) -> C {
    let mut dp = vec![C::zero(); t + 1];
    dp[0] = C::one();
    let mut reach = 0usize;
    for &w in weights {
        let w = w as usize;
        if w > t {
            continue;
        }
        reach = (reach + w).min(t);
        for s in (w..=reach).rev() {
            let (lo, hi) = dp.split_at_mut(s);
            hi[0] += &lo[s - w];
        }
    }
    dp.swap_remove(t)
}

fn gamma_dp<C: Cell>(weights: &[u64], t: usize, g: usize) -> C {
    let width = t + 1;
    let mut dp = vec![C::zero(); width * (g + 1)];
    dp[0] = C::one();
    for (i, &w) in weights.iter().enumerate() {
        let w = w as usize;
        if w > t {
            continue;
        }
        for c in (1..=g.min(i + 1)).rev() {
            for s in (w..=t).rev() {
                let dst = c * width + s;
                let src = (c - 1) * width + s - w;
                let (lo, hi) = dp.split_at_mut(dst);
                hi[0] += &lo[src];
            }
        }
    }
    dp.swap_remove(g * width + t)
}
