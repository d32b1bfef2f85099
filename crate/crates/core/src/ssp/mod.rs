//! Subset-sum instances produced by the attacks, plus exact counting and
//! enumeration of their solutions.

mod count;
mod hamming;
mod instance;
mod mitm;

pub use count::{
    count_gamma_solutions, count_gamma_with_budget, count_solutions, count_with_budget,
    MAX_DP_CELLS,
};
pub use hamming::{hamming_histogram, HammingHistogram};
pub use instance::{
    bits_to_mask, eve_reduction, mask_to_bits, steve_reduction, BackMap, GammaSspInstance,
    InstanceJson, Provenance, SspInstance,
};
pub use mitm::{
    count_mitm, enumerate_gamma_solutions, enumerate_solutions, SolutionSet, MAX_ENUM_N,
};
