//! Randomized known-plaintext attacks and the attack/verify experiment.

mod experiment;
mod search;

pub use experiment::{
    predicted_draws, run_kpa_experiment, Attacker, FlipMode, KpaConfig, KpaExperimentRecord,
    KpaOutcome, KpaSummary, MAX_MEAN_DRAWS,
};
pub use search::{eve_repair_row, eve_search_row, steve_search_row, RowSearch};

pub use crate::predictor::repeated_attack_failure;
