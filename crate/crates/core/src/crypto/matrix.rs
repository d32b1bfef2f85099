use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::lfsr::{BitSource, KeyMaterial};
use crate::{Error, Result};

/// Upper limit on `n * L` so that every ciphertext sum fits comfortably in `i64`.
pub const MAX_SUM_BOUND: i128 = 1 << 62;

/// Integer plaintext with entries in `[-L, L]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaintext {
    entries: Vec<i64>,
    bound: i64,
}

impl Plaintext {
    pub fn new(entries: Vec<i64>, bound: i64) -> Result<Self> {
        if bound <= 0 {
            return Err(Error::Config(format!(
                "bound L must be positive, got {bound}"
            )));
        }
        if (entries.len() as i128) * (bound as i128) >= MAX_SUM_BOUND {
            return Err(Error::Config(format!(
                "n*L = {}*{} does not fit the 2^62 sum budget",
                entries.len(),
                bound
            )));
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| v.abs() > bound) {
            return Err(Error::OutOfBound {
                index,
                value,
                bound,
            });
        }
        Ok(Plaintext { entries, bound })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// `B_x = ceil(log2(2L + 1))`.
    pub fn word_bits(&self) -> u32 {
        ceil_log2(2 * self.bound as u128 + 1)
    }

    pub fn strictly_nonzero(&self) -> bool {
        self.entries.iter().all(|&v| v != 0)
    }

    /// Errors on the first zero entry; attack reductions need all `x_l != 0`.
    pub fn require_nonzero(&self) -> Result<()> {
        match self.entries.iter().position(|&v| v == 0) {
            Some(index) => Err(Error::ZeroEntry { index }),
            None => Ok(()),
        }
    }

    pub fn abs_sum(&self) -> i64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }
}

/// Bound for a plaintext of `bits` bits: `L = 2^(bits-1) - 1`.
pub fn bound_for_bits(bits: u32) -> i64 {
    assert!((2..=62).contains(&bits));
    (1i64 << (bits - 1)) - 1
}

pub(crate) fn ceil_log2(v: u128) -> u32 {
    if v <= 1 {
        0
    } else {
        128 - (v - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub entries: Vec<i64>,
    /// `B_y = B_x + ceil(log2 n)`, enough for a lossless representation.
    pub word_bits: u32,
}

/// Dense `m x n` matrix with entries in `{-1, +1}`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct AntipodalMatrix {
    rows: usize,
    cols: usize,
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i8>>,
}

impl From<AntipodalMatrix> for MatrixJson {
    fn from(a: AntipodalMatrix) -> Self {
        MatrixJson {
            rows: a.rows,
            cols: a.cols,
            entries: (0..a.rows).map(|j| a.row(j).to_vec()).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for AntipodalMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows {
            return Err(Error::DimensionMismatch {
                expected: j.rows,
                actual: j.entries.len(),
            });
        }
        let mut signs = Vec::with_capacity(j.rows * j.cols);
        for row in j.entries {
            if row.len() != j.cols {
                return Err(Error::DimensionMismatch {
                    expected: j.cols,
                    actual: row.len(),
                });
            }
            signs.extend(row);
        }
        AntipodalMatrix::from_signs(j.rows, j.cols, signs)
    }
}

impl AntipodalMatrix {
    pub fn from_signs(rows: usize, cols: usize, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: signs.len(),
            });
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Config("antipodal entries must be -1 or +1".into()));
        }
        Ok(AntipodalMatrix { rows, cols, signs })
    }

    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        AntipodalMatrix::try_from(MatrixJson {
            rows: m,
            cols: n,
            entries: rows,
        })
    }

    /// Maps `rows * cols` bits from `source` to symbols, bit 0 -> -1, bit 1 -> +1.
    pub fn from_bits<S: BitSource + ?Sized>(rows: usize, cols: usize, source: &mut S) -> Self {
        let signs = (0..rows * cols)
            .map(|_| if source.next_bit() { 1 } else { -1 })
            .collect();
        AntipodalMatrix { rows, cols, signs }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, j: usize) -> &[i8] {
        &self.signs[j * self.cols..(j + 1) * self.cols]
    }

    pub fn get(&self, j: usize, l: usize) -> i8 {
        self.signs[j * self.cols + l]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn set_row(&mut self, j: usize, row: &[i8]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: row.len(),
            });
        }
        if row.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Config("antipodal entries must be -1 or +1".into()));
        }
        self.signs[j * self.cols..(j + 1) * self.cols].copy_from_slice(row);
        Ok(())
    }

    pub fn hamming_distance(&self, other: &AntipodalMatrix) -> usize {
        self.signs
            .iter()
            .zip(&other.signs)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Entries as `f64`, row-major, for the recovery solvers.
    pub fn to_f64(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| s as f64).collect()
    }

    /// Compact binary form: `rows` and `cols` as little-endian `u32`, then
    /// row-major sign bits packed LSB first (1 = +1).
    pub fn to_bytes(&self) -> Vec<u8> {
        pack_bits(self.rows, self.cols, self.signs.iter().map(|&s| s == 1))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (rows, cols, bits) = unpack_bits(bytes)?;
        let signs = bits.into_iter().map(|b| if b { 1 } else { -1 }).collect();
        Ok(AntipodalMatrix { rows, cols, signs })
    }
}

fn pack_bits(rows: usize, cols: usize, bits: impl Iterator<Item = bool>) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + (rows * cols).div_ceil(8));
    out.extend_from_slice(&(rows as u32).to_le_bytes());
    out.extend_from_slice(&(cols as u32).to_le_bytes());
    let mut byte = 0u8;
    let mut filled = 0;
    for bit in bits {
        byte |= (bit as u8) << filled;
        filled += 1;
        if filled == 8 {
            out.push(byte);
            byte = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push(byte);
    }
    out
}

fn unpack_bits(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>)> {
    if bytes.len() < 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: bytes.len(),
        });
    }
    let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let total = rows * cols;
    let body = &bytes[8..];
    if body.len() != total.div_ceil(8) {
        return Err(Error::DimensionMismatch {
            expected: total.div_ceil(8),
            actual: body.len(),
        });
    }
    let bits = (0..total)
        .map(|i| body[i / 8] >> (i % 8) & 1 == 1)
        .collect();
    Ok((rows, cols, bits))
}

/// Set of `(row, col)` positions at which a matrix is sign-flipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipSet {
    rows: usize,
    cols: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl FlipSet {
    pub fn new(
        rows: usize,
        cols: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (row, col) in pairs {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            set.insert((row, col));
        }
        Ok(FlipSet {
            rows,
            cols,
            pairs: set,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        FlipSet {
            rows,
            cols,
            pairs: BTreeSet::new(),
        }
    }

    /// `c` distinct positions drawn uniformly over the `rows * cols` grid
    /// (Floyd's sampling, fed by `source`).
    pub fn draw_uniform<S: BitSource + ?Sized>(
        rows: usize,
        cols: usize,
        count: usize,
        source: &mut S,
    ) -> Result<Self> {
        let total = rows * cols;
        if count > total {
            return Err(Error::Config(format!(
                "cannot flip {count} of {total} entries"
            )));
        }
        let picked = floyd_sample(total, count, source);
        Ok(FlipSet {
            rows,
            cols,
            pairs: picked.into_iter().map(|i| (i / cols, i % cols)).collect(),
        })
    }

    /// Exactly `row_counts[j]` positions in row `j`, uniform within the row.
    pub fn draw_per_row<S: BitSource + ?Sized>(
        rows: usize,
        cols: usize,
        row_counts: &[usize],
        source: &mut S,
    ) -> Result<Self> {
        if row_counts.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                actual: row_counts.len(),
            });
        }
        let mut pairs = BTreeSet::new();
        for (j, &c) in row_counts.iter().enumerate() {
            if c > cols {
                return Err(Error::Config(format!(
                    "row {j}: {c} flips in {cols} columns"
                )));
            }
            pairs.extend(floyd_sample(cols, c, source).into_iter().map(|l| (j, l)));
        }
        Ok(FlipSet { rows, cols, pairs })
    }

    /// Flip count `round(eta * m * n)` drawn uniformly.
    pub fn draw_density<S: BitSource + ?Sized>(
        rows: usize,
        cols: usize,
        eta: f64,
        source: &mut S,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("flip density {eta} outside [0, 1]")));
        }
        let count = (eta * (rows * cols) as f64).round() as usize;
        FlipSet::draw_uniform(rows, cols, count, source)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.pairs.contains(&(row, col))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows];
        for &(j, _) in &self.pairs {
            counts[j] += 1;
        }
        counts
    }

    /// `eta = c / (m n)`.
    pub fn density(&self) -> f64 {
        if self.rows * self.cols == 0 {
            return 0.0;
        }
        self.len() as f64 / (self.rows * self.cols) as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let total = self.rows * self.cols;
        pack_bits(
            self.rows,
            self.cols,
            (0..total).map(|i| self.pairs.contains(&(i / self.cols, i % self.cols))),
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (rows, cols, bits) = unpack_bits(bytes)?;
        let pairs = bits
            .into_iter()
            .enumerate()
            .filter(|(_, b)| *b)
            .map(|(i, _)| (i / cols, i % cols))
            .collect();
        Ok(FlipSet { rows, cols, pairs })
    }
}

fn floyd_sample<S: BitSource + ?Sized>(total: usize, count: usize, source: &mut S) -> Vec<usize> {
    let mut chosen = BTreeSet::new();
    for j in total - count..total {
        let t = source.next_below(j as u64 + 1) as usize;
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

/// Negates `a0` at every position in `flips`.
pub fn apply_flips(a0: &AntipodalMatrix, flips: &FlipSet) -> Result<AntipodalMatrix> {
    if a0.rows != flips.rows || a0.cols != flips.cols {
        let (row, col) = flips
            .pairs()
            .find(|&(j, l)| j >= a0.rows || l >= a0.cols)
            .unwrap_or((flips.rows, flips.cols));
        return Err(Error::IndexOutOfRange {
            row,
            col,
            rows: a0.rows,
            cols: a0.cols,
        });
    }
    let mut out = a0.clone();
    for (j, l) in flips.pairs() {
        out.signs[j * a0.cols + l] = -out.signs[j * a0.cols + l];
    }
    Ok(out)
}

/// Exact integer measurements `y = A x`.
pub fn encode(x: &Plaintext, a: &AntipodalMatrix) -> Result<Ciphertext> {
    if a.cols != x.len() {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            actual: x.len(),
        });
    }
    let entries = (0..a.rows)
        .map(|j| row_dot(a.row(j), x.entries()))
        .collect();
    Ok(Ciphertext {
        entries,
        word_bits: x.word_bits() + ceil_log2(x.len() as u128),
    })
}

pub fn row_dot(row: &[i8], x: &[i64]) -> i64 {
    row.iter().zip(x).map(|(&a, &v)| a as i64 * v).sum()
}

/// Matrix `t` of the keystream: bits `[t m n, (t+1) m n)` mapped to symbols.
pub fn expand_matrix(
    key: &KeyMaterial,
    rows: usize,
    cols: usize,
    t: u64,
) -> Result<AntipodalMatrix> {
    let mut lfsr = key.lfsr()?;
    let period = lfsr.maximal_period();
    let block = (rows * cols) as u128;
    let needed = (t as u128 + 1) * block;
    if block > 0 && needed > period {
        return Err(Error::PeriodExhausted { needed, period });
    }
    lfsr.skip(t as u128 * block);
    Ok(AntipodalMatrix::from_bits(rows, cols, &mut lfsr))
}
