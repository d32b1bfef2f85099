//! Asymptotic expected solution counts for the two attacks, their profiles
//! over the normalized target, and key-lifetime arithmetic.
//!
//! The formulas hold as `n` grows; finite-`n` behaviour is what the
//! experiments module measures.

mod counts;
pub mod quad;
mod saddle;

pub use counts::{
    fit_gaussian_variance, key_lifetime, repeated_attack_failure, s_eve_expected, s_eve_hamming,
    s_eve_hamming_cumulative, s_eve_profile, s_eve_tau_average, s_steve_expected, s_steve_profile,
    s_steve_tau_average, ProfileSample,
};
pub use saddle::{ab_domain_contains, f_p, g_p, softplus_integral, solve_a, solve_ab, QUAD_TOL};
