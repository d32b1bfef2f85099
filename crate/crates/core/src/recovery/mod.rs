//! Sparse test signals and their recovery from compressed measurements.

mod basis;
mod metrics;
mod signal;
mod solver;
mod sweep;

pub use basis::{BasisKind, SparseBasis};
pub use metrics::{arsnr, mean_std, pearson, rsnr, RSNR_CAP_DB};
pub use signal::{synth_sparse, SparseSignal};
pub use solver::{recover, Decoder, RecoveryResult, StopRule};
pub use sweep::{eta_sweep, EtaPoint, EtaSweepConfig};
