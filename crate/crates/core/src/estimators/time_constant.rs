use serde::Serialize;

use super::{replica_seed, replicate};
use crate::distributions::EdgeWeightModel;
use crate::error::{Error, Result};
use crate::lattice::{Environment, Region, Site};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerNMean {
    pub n: u32,
    /// Mean of `T(0, n·e_1)` over replicas.
    pub mean: f64,
    /// Standard error of `mean`.
    pub stderr: f64,
}

impl PerNMean {
    pub fn ratio(&self) -> f64 {
        self.mean / self.n as f64
    }

    pub fn ratio_stderr(&self) -> f64 {
        self.stderr / self.n as f64
    }
}

/// Estimate of the time constant `μ(e_1) = lim T(0, n·e_1)/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeConstantEstimate {
    pub mu_hat: f64,
    pub n_used: u32,
    pub replicas: usize,
    pub stderr: f64,
    pub per_n_means: Vec<PerNMean>,
}

impl TimeConstantEstimate {
    /// `E T(0,n e_1)/n` is non-increasing along a subadditive sequence; checks
    /// each consecutive pair allowing `k` combined standard errors of slack.
    pub fn subadditive_within(&self, k: f64) -> bool {
        self.per_n_means.windows(2).all(|w| {
            let slack = k * w[0].ratio_stderr().hypot(w[1].ratio_stderr());
            w[1].ratio() <= w[0].ratio() + slack
        })
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Estimates `μ(e_1)` from `T(0, n·e_1)` over independent environments.
///
/// One Dijkstra per replica serves every `n` in `n_list`. `mu_hat` is the
/// replica mean of `T(0, n_max·e_1)/n_max`.
pub fn estimate_time_constant(
    model: &EdgeWeightModel,
    d: usize,
    n_list: &[u32],
    replicas: usize,
    base_seed: u64,
) -> Result<TimeConstantEstimate> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidInput(
            "n_list must be non-empty, positive and strictly ascending".into(),
        ));
    }
    if replicas < 30 {
        return Err(Error::InvalidInput(format!(
            "time-constant estimation needs at least 30 replicas, got {replicas}"
        )));
    }
    let base = Environment::new(d, model.clone(), base_seed)?;
    let targets: Vec<Site> = n_list
        .iter()
        .map(|&n| Site::on_axis(d, 0, n as i32))
        .collect();
    let origin = Site::origin(d);
    let times = replicate(replicas, |ws, i| {
        let env = base.with_seed(replica_seed(base_seed, i));
        let ts = ws.passage_times_to(&env, &origin, &targets, &Region::Full)?;
        if let Some(bad) = ts.iter().position(|t| !t.is_finite()) {
            return Err(Error::Inconsistent(format!(
                "replica {i}: infinite passage time to n = {}",
                n_list[bad]
            )));
        }
        Ok(ts)
    })?;
    let per_n_means: Vec<PerNMean> = n_list
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let column: Vec<f64> = times.iter().map(|t| t[j]).collect();
            let (mean, stderr) = mean_and_stderr(&column);
            PerNMean { n, mean, stderr }
        })
        .collect();
    let n_max = *n_list.last().unwrap();
    let ratios: Vec<f64> = times
        .iter()
        .map(|t| t[n_list.len() - 1] / n_max as f64)
        .collect();
    let (mu_hat, stderr) = mean_and_stderr(&ratios);
    Ok(TimeConstantEstimate {
        mu_hat,
        n_used: n_max,
        replicas,
        stderr,
        per_n_means,
    })
}
