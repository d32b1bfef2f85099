//! Plaintext/ciphertext model, keystream expansion and the two-class
//! sign-flip construction.

mod berlekamp_massey;
mod lfsr;
mod matrix;

pub use berlekamp_massey::{berlekamp_massey, recover_lfsr, LinearRecurrence};
pub use lfsr::{is_primitive, BitSource, KeyMaterial, Lfsr, RngBits, DEFAULT_TAPS_32};
pub use matrix::{
    apply_flips, bound_for_bits, encode, expand_matrix, row_dot, AntipodalMatrix, Ciphertext,
    FlipSet, Plaintext, MAX_SUM_BOUND,
};
