use serde::{Deserialize, Serialize};

use super::{replica_seed, replicate};
use crate::distributions::{log_add_exp, EdgeWeightModel};
use crate::error::{Error, Result};
use crate::lattice::{origin_edges, EdgeWeights, Environment, Region, Site};
use crate::mixing::{uniform, AUX_STREAM};

/// Mixture weight used when none is given.
pub const DEFAULT_MIXTURE_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Naive,
    Tilted,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Naive => "naive",
            EstimatorKind::Tilted => "tilted",
        }
    }
}

/// The event `T(0, n·x) > n(μ̂ + ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailQuery {
    pub model: EdgeWeightModel,
    pub d: usize,
    pub xi: f64,
    pub n: u32,
    pub mu_hat: f64,
    /// Lattice direction `x`; the target is `n·x`.
    pub direction: Site,
    pub region: Region,
}

impl TailQuery {
    pub fn new(model: EdgeWeightModel, d: usize, xi: f64, n: u32, mu_hat: f64) -> Result<Self> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::Domain(format!("xi must be positive, got {xi}")));
        }
        Self::diagnostic(model, d, xi, n, mu_hat)
    }

    /// Like [`TailQuery::new`] but allows `ξ ≤ 0`, for bulk checks.
    pub fn diagnostic(
        model: EdgeWeightModel,
        d: usize,
        xi: f64,
        n: u32,
        mu_hat: f64,
    ) -> Result<Self> {
        if !(2..=crate::lattice::MAX_DIM).contains(&d) {
            return Err(Error::DimensionMismatch { expected: 2, got: d });
        }
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if !(mu_hat >= 0.0) || !mu_hat.is_finite() || !xi.is_finite() {
            return Err(Error::Domain(format!("bad mu_hat {mu_hat} or xi {xi}")));
        }
        Ok(Self {
            model,
            d,
            xi,
            n,
            mu_hat,
            direction: Site::on_axis(d, 0, 1),
            region: Region::Full,
        })
    }

    pub fn with_direction(mut self, direction: Site) -> Self {
        self.direction = direction;
        self
    }

    pub fn within(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.n as f64 * (self.mu_hat + self.xi)
    }

    pub fn target(&self) -> Result<Site> {
        let s = Site::new(
            &self
                .direction
                .coords()
                .iter()
                .map(|&c| c * self.n as i32)
                .collect::<Vec<_>>(),
        );
        if !s.in_range() {
            return Err(Error::CoordinateOverflow(
                s.coords().iter().map(|&c| c as i64).max().unwrap_or(0),
            ));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    /// `ln p̂`; stays finite when `p̂` underflows. `-inf` with no hits.
    pub log_p: f64,
    pub variance: f64,
    pub stderr: f64,
    /// `stderr / p̂`, computed in the log domain.
    pub rel_stderr: f64,
    pub replicas: usize,
    pub hits: usize,
    pub estimator_kind: EstimatorKind,
    pub tilt_shift: Option<f64>,
    pub mixture_weight: Option<f64>,
    pub threshold: f64,
}

/// Per-replica passage times and log likelihood ratios.
///
/// Kept so the tail can be re-evaluated at several thresholds without
/// resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSamples {
    pub kind: EstimatorKind,
    pub shift: Option<f64>,
    pub mixture_weight: Option<f64>,
    pub times: Vec<f64>,
    /// All zero for the naive estimator.
    pub log_lr: Vec<f64>,
}

impl TailSamples {
    pub fn replicas(&self) -> usize {
        self.times.len()
    }

    /// Estimates `P(T > threshold)` (or `≥` when `inclusive`).
    pub fn estimate_at(&self, threshold: f64, inclusive: bool) -> TailEstimate {
        let m = self.times.len() as f64;
        let hit = |t: f64| if inclusive { t >= threshold } else { t > threshold };
        let logs: Vec<f64> = self
            .times
            .iter()
            .zip(&self.log_lr)
            .filter(|(t, _)| hit(**t))
            .map(|(_, l)| *l)
            .collect();
        let hits = logs.len();
        let (log_p, variance, rel_stderr) = match self.kind {
            EstimatorKind::Naive => {
                let p = hits as f64 / m;
                let var = p * (1.0 - p) / m;
                let rel = if hits > 0 { var.sqrt() / p } else { f64::INFINITY };
                (p.ln(), var, rel)
            }
            EstimatorKind::Tilted => {
                if hits == 0 {
                    (f64::NEG_INFINITY, 0.0, f64::INFINITY)
                } else {
                    // sample variance of Y_i = 1{hit}·LR_i, scaled by e^{-2·top}
                    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
                    let sum_sq: f64 = logs.iter().map(|l| (2.0 * (l - top)).exp()).sum();
                    let log_p = top + sum.ln() - m.ln();
                    let mean_scaled = sum / m;
                    let var_y_scaled = if m > 1.0 {
                        ((sum_sq - m * mean_scaled * mean_scaled) / (m - 1.0)).max(0.0)
                    } else {
                        0.0
                    };
                    let var_scaled = var_y_scaled / m;
                    let rel = var_scaled.sqrt() / mean_scaled;
                    (log_p, var_scaled * (2.0 * top).exp(), rel)
                }
            }
        };
        let p_hat = log_p.exp();
        TailEstimate {
            p_hat,
            log_p,
            variance,
            stderr: variance.sqrt(),
            rel_stderr,
            replicas: self.times.len(),
            hits,
            estimator_kind: self.kind,
            tilt_shift: self.shift,
            mixture_weight: self.mixture_weight,
            threshold,
        }
    }
}

/// Plain Monte Carlo samples of `T(0, n·x)`.
pub fn naive_samples(q: &TailQuery, replicas: usize, base_seed: u64) -> Result<TailSamples> {
    Ok(tail_sweep(q, &[q.n], None, replicas, base_seed)?.remove(0))
}

pub fn naive_tail(q: &TailQuery, replicas: usize, base_seed: u64) -> Result<TailEstimate> {
    Ok(naive_samples(q, replicas, base_seed)?.estimate_at(q.threshold(), false))
}

/// Importance sampling that shifts the origin edges by `shift`.
///
/// The tilted edges are the origin edges the query's region allows, which is
/// all `2d` of them on the full lattice. Each replica flips one coin: with
/// probability `w` every tilted edge is
/// drawn as `τ + shift`, otherwise from the law itself. The likelihood ratio
/// is taken against the joint mixture,
/// `∏f(τ_e) / (w·∏f(τ_e − s) + (1 − w)·∏f(τ_e))`, which never exceeds
/// `1/(1 − w)`. With `w = 1` it reduces to `∏f(τ_e)/f(τ_e − s)`.
pub fn tilted_samples(
    q: &TailQuery,
    shift: f64,
    w: f64,
    replicas: usize,
    base_seed: u64,
) -> Result<TailSamples> {
    Ok(tail_sweep(q, &[q.n], Some((&[shift], w)), replicas, base_seed)?.remove(0))
}

/// Samples for several `n` from one search per replica.
///
/// `q` supplies the law, dimension, direction and region; its `n` is ignored.
/// With `tilt = Some((shifts, w))` the replica's coin is shared across all
/// `n` and `shifts[j]` applies to `ns[j]`.
///
/// A self-avoiding path out of the origin crosses exactly one origin edge, so
/// raising every usable origin edge by `s` raises `T(0, y)` by exactly `s`
/// for all `y ≠ 0`. Tilted times are computed that way from the untilted
/// search.
pub fn tail_sweep(
    q: &TailQuery,
    ns: &[u32],
    tilt: Option<(&[f64], f64)>,
    replicas: usize,
    base_seed: u64,
) -> Result<Vec<TailSamples>> {
    if replicas == 0 {
        return Err(Error::InvalidInput("replicas must be positive".into()));
    }
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::InvalidInput("n values must be positive".into()));
    }
    if let Some((shifts, w)) = tilt {
        if shifts.len() != ns.len() {
            return Err(Error::InvalidInput("one tilt shift per n is required".into()));
        }
        if let Some(s) = shifts.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::Domain(format!("tilt shift must be positive, got {s}")));
        }
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::Domain(format!("mixture weight must lie in (0,1], got {w}")));
        }
        if !q.model.is_continuous() {
            return Err(Error::NoDensity);
        }
    }
    let base = Environment::new(q.d, q.model.clone(), base_seed)?;
    let targets = ns
        .iter()
        .map(|&n| {
            let mut t = q.clone();
            t.n = n;
            t.target()
        })
        .collect::<Result<Vec<Site>>>()?;
    let origin = Site::origin(q.d);
    let edges: Vec<_> = origin_edges(q.d)
        .into_iter()
        .filter(|e| q.region.allows_edge(e))
        .collect();
    let model = &q.model;
    let rows = replicate(replicas, |ws, i| {
        let env = base.with_seed(replica_seed(base_seed, i));
        let times = ws.passage_times_to(&env, &origin, &targets, &q.region)?;
        let Some((shifts, w)) = tilt else {
            return Ok(times.into_iter().map(|t| (t, 0.0)).collect::<Vec<_>>());
        };
        let tilted = uniform(env.seed(), AUX_STREAM) < w;
        let taus: Vec<f64> = edges.iter().map(|e| env.edge_weight(e)).collect();
        let mut out = Vec::with_capacity(ns.len());
        for ((&t, &s), target) in times.iter().zip(shifts).zip(&targets) {
            let log_lr = mixture_log_lr(model, &taus, tilted, s, w)?;
            let lifted = if tilted && *target != origin { t + s } else { t };
            out.push((lifted, log_lr));
        }
        Ok(out)
    })?;
    let (shift_list, w) = match tilt {
        Some((s, w)) => (Some(s), Some(w)),
        None => (None, None),
    };
    Ok((0..ns.len())
        .map(|j| TailSamples {
            kind: if tilt.is_some() {
                EstimatorKind::Tilted
            } else {
                EstimatorKind::Naive
            },
            shift: shift_list.map(|s| s[j]),
            mixture_weight: w,
            times: rows.iter().map(|r| r[j].0).collect(),
            log_lr: rows.iter().map(|r| r[j].1).collect(),
        })
        .collect())
}

/// Log likelihood ratio of the origin-edge draw against the defensive mixture.
///
/// `taus` are the untilted draws; the proposal value is `τ + s` when `tilted`.
/// Errors if the ratio exceeds `1/(1 − w)`.
fn mixture_log_lr(
    model: &EdgeWeightModel,
    taus: &[f64],
    tilted: bool,
    s: f64,
    w: f64,
) -> Result<f64> {
    let mut log_f = 0.0;
    let mut log_fs = 0.0;
    for &tau in taus {
        let x = if tilted { tau + s } else { tau };
        log_f += model.log_density(x)?;
        log_fs += if x >= s {
            model.log_density(x - s)?
        } else {
            f64::NEG_INFINITY
        };
    }
    let log_den = if w < 1.0 {
        log_add_exp(w.ln() + log_fs, (-w).ln_1p() + log_f)
    } else {
        log_fs
    };
    let log_lr = log_f - log_den;
    let cap = -(-w).ln_1p();
    if log_lr.is_nan() || log_lr > cap + 1e-9 {
        return Err(Error::Inconsistent(format!(
            "log likelihood ratio {log_lr} exceeds the mixture cap {cap}"
        )));
    }
    Ok(log_lr)
}

pub fn tilted_tail(
    q: &TailQuery,
    shift: Option<f64>,
    w: Option<f64>,
    replicas: usize,
    base_seed: u64,
) -> Result<TailEstimate> {
    let shift = shift.unwrap_or(q.xi * q.n as f64);
    let w = w.unwrap_or(DEFAULT_MIXTURE_WEIGHT);
    Ok(tilted_samples(q, shift, w, replicas, base_seed)?.estimate_at(q.threshold(), false))
}

/// Samples of `T_{S_K(0,n)}(0, n·e_1)` inside the slab of half-width `K`.
pub fn slab_samples(
    model: &EdgeWeightModel,
    d: usize,
    half_width: u32,
    n: u32,
    replicas: usize,
    base_seed: u64,
    tilt: Option<(f64, f64)>,
) -> Result<TailSamples> {
    if n < half_width {
        return Err(Error::InvalidInput(format!(
            "slab length {n} is shorter than its half-width {half_width}"
        )));
    }
    let q = TailQuery::diagnostic(model.clone(), d, 0.0, n, 0.0)?
        .within(Region::slab(vec![0; d - 1], half_width, n));
    match tilt {
        None => naive_samples(&q, replicas, base_seed),
        Some((shift, w)) => tilted_samples(&q, shift, w, replicas, base_seed),
    }
}

/// `P(T_{S_K}(0, n·e_1) ≥ (μ̂ + ε)n)` by plain Monte Carlo.
#[allow(clippy::too_many_arguments)]
pub fn slab_tail(
    model: &EdgeWeightModel,
    d: usize,
    half_width: u32,
    n: u32,
    epsilon: f64,
    mu_hat: f64,
    replicas: usize,
    base_seed: u64,
) -> Result<TailEstimate> {
    let s = slab_samples(model, d, half_width, n, replicas, base_seed, None)?;
    Ok(s.estimate_at((mu_hat + epsilon) * n as f64, true))
}
