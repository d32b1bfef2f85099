//! Distributional checks of the randomized row searches against exact
//! enumeration and the expected-count formula.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, DiscreteCDF, Geometric};

use cskpa_core::attack::{eve_search_row, steve_search_row};
use cskpa_core::crypto::{row_dot, AntipodalMatrix, RngBits};
use cskpa_core::experiments::random_plaintext;
use cskpa_core::predictor::s_eve_expected;
use cskpa_core::ssp::{
    enumerate_gamma_solutions, enumerate_solutions, eve_reduction, steve_reduction,
};
use cskpa_core::Error;

fn row_mask(row: &[i8], reference: &[i8]) -> u64 {
    row.iter()
        .zip(reference)
        .enumerate()
        .fold(0, |m, (l, (a, b))| if a != b { m | 1 << l } else { m })
}

/// Pearson chi-square p-value of `hits` against a uniform law on `cells`.
fn uniform_p_value(hits: &HashMap<u64, u64>, cells: usize, total: u64) -> f64 {
    let expect = total as f64 / cells as f64;
    let observed: f64 = hits
        .values()
        .map(|&o| (o as f64 - expect).powi(2) / expect)
        .sum();
    let unseen = (cells - hits.len()) as f64 * expect;
    let stat = observed + unseen;
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn eve_rows_are_uniform_over_the_solution_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let n = 16;
    let x = random_plaintext(n, 200, &mut rng).unwrap();
    let a = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng));
    let y = row_dot(a.row(0), x.entries());
    let inst = eve_reduction(&x, y, Some(a.row(0)), 0).unwrap();
    let set = enumerate_solutions(&inst, usize::MAX).unwrap();
    assert!(set.len() >= 20, "{} solutions", set.len());

    // b_l = 1 where row_l agrees with sign(x_l); all-minus-sign row is b = 0
    let base: Vec<i8> = x.entries().iter().map(|&v| -(v.signum() as i8)).collect();
    let trials = 100 * set.len() as u64;
    let mut hits = HashMap::new();
    for _ in 0..trials {
        let hit = eve_search_row(&x, y, &mut rng, u64::MAX).unwrap();
        let mask = row_mask(&hit.row, &base);
        assert!(set.contains(mask));
        *hits.entry(mask).or_insert(0) += 1;
    }
    let p = uniform_p_value(&hits, set.len(), trials);
    assert!(p > 0.01, "chi-square p = {p}");
}

#[test]
fn steve_rows_are_uniform_over_the_solution_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let n = 16;
    let c = 3;
    let bound = 20;
    let x = random_plaintext(n, bound, &mut rng).unwrap();
    // steer clear of A0_l x_l = L, where the reduction weight vanishes
    let signs: Vec<i8> = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng))
        .row(0)
        .iter()
        .zip(x.entries())
        .map(|(&a, &v)| if a as i64 * v == bound { -a } else { a })
        .collect();
    let a0 = AntipodalMatrix::from_signs(1, n, signs).unwrap();
    let mut a1 = a0.row(0).to_vec();
    for l in [1, 6, 11] {
        a1[l] = -a1[l];
    }
    let y = row_dot(&a1, x.entries());
    let inst = steve_reduction(&x, y, a0.row(0), c, Some(&a1), 0).unwrap();
    let set = enumerate_gamma_solutions(&inst, usize::MAX).unwrap();
    assert!(set.len() >= 5, "{} solutions", set.len());
    let trials = 200 * set.len() as u64;
    let mut hits = HashMap::new();
    for _ in 0..trials {
        let hit = steve_search_row(&x, y, a0.row(0), c, &mut rng, u64::MAX).unwrap();
        let mask = row_mask(&hit.row, a0.row(0));
        assert!(set.contains(mask));
        *hits.entry(mask).or_insert(0) += 1;
    }
    let p = uniform_p_value(&hits, set.len(), trials);
    assert!(p > 0.01, "chi-square p = {p}");
}

#[test]
fn eve_draw_counts_are_geometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let n = 20;
    let x = random_plaintext(n, 100, &mut rng).unwrap();
    let a = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng));
    let y = row_dot(a.row(0), x.entries());
    let inst = eve_reduction(&x, y, None, 0).unwrap();
    let count = enumerate_solutions(&inst, usize::MAX).unwrap().len();
    let p = count as f64 / (1u64 << n) as f64;
    let geo = Geometric::new(p).unwrap();

    let trials = 2000;
    let mut draws: Vec<u64> = (0..trials)
        .map(|_| eve_search_row(&x, y, &mut rng, u64::MAX).unwrap().draws)
        .collect();
    draws.sort_unstable();
    // Kolmogorov-Smirnov distance, checked on both sides of every jump
    let total = trials as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < draws.len() {
        let k = draws[i];
        let below = i as f64 / total;
        while i < draws.len() && draws[i] == k {
            i += 1;
        }
        d = d.max((below - geo.cdf(k - 1)).abs());
        d = d.max((i as f64 / total - geo.cdf(k)).abs());
    }
    let critical = 1.63 / (trials as f64).sqrt();
    assert!(d < critical, "KS distance {d} vs {critical}");
}

#[test]
fn pooled_hit_rate_matches_expected_count() {
    // one uniform search row hits with probability S/2^n; at n=32, L=128
    // that is 1 / (L sqrt(pi n / 3)), about 1/741
    let (n, bound) = (32, 128);
    let predicted = (1u64 << n) as f64 / s_eve_expected(n, bound as u64).to_f64();
    assert!((predicted - 741.0).abs() < 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let budget = 20_000;
    let instances = 200;
    let mut hits = 0u64;
    for _ in 0..instances {
        let x = random_plaintext(n, bound, &mut rng).unwrap();
        let a = AntipodalMatrix::from_bits(1, n, &mut RngBits::new(&mut rng));
        let y = row_dot(a.row(0), x.entries());
        let mut left = budget;
        while left > 0 {
            match eve_search_row(&x, y, &mut rng, left) {
                Ok(hit) => {
                    hits += 1;
                    left -= hit.draws;
                }
                Err(Error::Exhausted { .. }) => break,
                Err(e) => panic!("{e}"),
            }
        }
    }
    let measured = (budget * instances) as f64 / hits as f64;
    assert!(
        (measured / predicted - 1.0).abs() < 0.2,
        "{measured} draws per hit vs {predicted}"
    );
}
