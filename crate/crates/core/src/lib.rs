//! Compressed-sensing encryption with antipodal matrices and the quantitative
//! analysis of known-plaintext attacks against it.
//!
//! Modules, bottom-up:
//!
//! * [`crypto`]: plaintext and ciphertext model, LFSR keystream expansion into
//!   antipodal matrices, two-class sign flips and the Berlekamp-Massey break.
//! * [`ssp`]: reductions of the eavesdropper and class-upgrade attacks to
//!   subset-sum problems, with exact DP counting and meet-in-the-middle
//!   enumeration.
//! * [`predictor`]: asymptotic expected solution counts, saddle-point
//!   profiles and key-lifetime arithmetic in the log domain.
//! * [`ehrhart`]: exact balanced-configuration counts and their
//!   interpolating rational polynomials.
//! * [`recovery`]: sparse synthesis and recovery for scoring candidates.
//! * [`attack`]: randomized candidate search and the attack/verify experiment.
//! * [`experiments`]: sample averages of enumerated counts against the
//!   predictors.
//! * [`io`]: versioned CSV and JSON output.

pub mod attack;
pub mod crypto;
pub mod ehrhart;
mod error;
pub mod experiments;
pub mod io;
mod logcount;
pub mod predictor;
pub mod recovery;
pub mod seeds;
pub mod ssp;

pub use error::{Error, Result};
pub use logcount::LogCount;

pub use crypto::{AntipodalMatrix, Ciphertext, FlipSet, Lfsr, Plaintext};
pub use ehrhart::RationalPolynomial;
pub use ssp::{GammaSspInstance, HammingHistogram, SolutionSet, SspInstance};

/// Version string echoed into experiment summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
