use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::EdgeWeightModel;
use crate::error::{Error, Result};
use crate::mixing::uniform;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumTailPoint {
    pub n: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    /// `None` for the degenerate law, which has no tail rate.
    pub bound: Option<f64>,
}

impl SumTailPoint {
    pub fn within_bound(&self) -> bool {
        self.bound.is_none_or(|b| self.p_hat <= b)
    }
}

/// Upper bound `exp(−(1−c)·rate(n))` for `P(X_1 + … + X_k > n)`.
///
/// The rate is `α n^r` for Weibull laws and `b(n) n^r` for the log-perturbed
/// family. For the anomalous law it is `α n` with `α` the decay rate of the
/// tower interval containing `n`: `α_2` on `[a_{2m}, a_{2m+1})`, `α_1` otherwise.
pub fn sum_tail_bound(model: &EdgeWeightModel, n: f64, c: f64) -> Option<f64> {
    let rate = match model {
        EdgeWeightModel::Weibull(m) => m.alpha() * n.powf(m.r()),
        EdgeWeightModel::LogPerturbed(m) => m.rate_at(n) * n.powf(m.r()),
        EdgeWeightModel::Anomalous(m) => m.regime_at(n).alpha * n,
        EdgeWeightModel::Degenerate(_) => return None,
    };
    Some((-(1.0 - c) * rate).exp())
}

/// Monte Carlo estimate of `P(X_1 + … + X_k > n)` for each `n` in `n_list`.
///
/// Every threshold is evaluated on the same `replicas` sums; draw `i` of
/// replica `j` uses stream key `j·k + i`. Hit counts are integers, so the
/// result does not depend on how the work is split.
pub fn sum_tail_check(
    model: &EdgeWeightModel,
    k: usize,
    n_list: &[f64],
    replicas: u64,
    seed: u64,
    c: f64,
) -> Result<Vec<SumTailPoint>> {
    if k == 0 || replicas == 0 {
        return Err(Error::InvalidInput("k and replicas must be positive".into()));
    }
    if n_list.is_empty() || n_list.iter().any(|n| !n.is_finite()) {
        return Err(Error::InvalidInput("n_list must be non-empty and finite".into()));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("bound constant c must lie in (0,1), got {c}")));
    }
    let chunks = replicas.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut counts = vec![0u64; n_list.len()];
            let lo = ch * CHUNK;
            let hi = (lo + CHUNK).min(replicas);
            for j in lo..hi {
                let base = j as u128 * k as u128;
                let s: f64 = (0..k as u128)
                    .map(|i| model.quantile_unchecked(uniform(seed, base + i)))
                    .sum();
                for (cnt, n) in counts.iter_mut().zip(n_list) {
                    if s > *n {
                        *cnt += 1;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n_list.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let m = replicas as f64;
    Ok(n_list
        .iter()
        .zip(counts)
        .map(|(&n, hits)| {
            let p = hits as f64 / m;
            SumTailPoint {
                n,
                p_hat: p,
                stderr: (p * (1.0 - p) / m).sqrt(),
                hits,
                bound: sum_tail_bound(model, n, c),
            }
        })
        .collect())
}
