//! Monte Carlo estimators built on the passage engine.
//!
//! Replica `i` of any estimator uses the environment seeded `base_seed + i`.
//! Work is spread over the current rayon pool, but per-replica results are
//! collected in replica order and reduced sequentially, so every estimate is
//! bit-identical regardless of the number of worker threads.

mod anomalous;
mod fit;
mod sum_tail;
mod tail;
mod time_constant;

pub use anomalous::{interval_log_slopes, interval_map, subsequence_scales, IntervalPrediction};
pub use fit::{fit_rate, fit_rate_with, rate_target, RateFit, RateTarget, Regressor};
pub use sum_tail::{sum_tail_bound, sum_tail_check, SumTailPoint};
pub use tail::{
    naive_samples, naive_tail, slab_samples, slab_tail, tail_sweep, tilted_samples, tilted_tail,
    EstimatorKind, TailEstimate, TailQuery, TailSamples, DEFAULT_MIXTURE_WEIGHT,
};
pub use time_constant::{estimate_time_constant, PerNMean, TimeConstantEstimate};

use rayon::prelude::*;

use crate::error::Result;
use crate::passage::SearchWorkspace;

pub(crate) fn replica_seed(base_seed: u64, index: u64) -> u64 {
    base_seed.wrapping_add(index)
}

/// Runs `f(workspace, replica_index)` for every replica, results in index order.
pub(crate) fn replicate<T, F>(replicas: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SearchWorkspace, u64) -> Result<T> + Sync + Send,
{
    (0..replicas as u64)
        .into_par_iter()
        .map_init(SearchWorkspace::new, |ws, i| f(ws, i))
        .collect()
}
