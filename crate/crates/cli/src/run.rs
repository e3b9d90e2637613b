//! Executes experiment configs and persists their results.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fpp_core::estimators::{
    estimate_time_constant, fit_rate_with, interval_map, rate_target, slab_samples,
    subsequence_scales, sum_tail_check, tail_sweep, RateFit, RateTarget, Regressor,
    DEFAULT_MIXTURE_WEIGHT,
};
use fpp_core::{EdgeWeightModel, EstimatorKind, TailEstimate, TailQuery, TailSamples};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind, MuConfig, NamedShift, ShiftRule};
use crate::dist_check::dist_check;
use crate::error::{CliError, Result};
use crate::rows::{model_alpha, model_label, write_csv, ResultRow};

/// Offset added to the run seed for the `μ̂` pre-run, keeping its
/// environments disjoint from the main replicas.
pub const MU_SEED_OFFSET: u64 = 1 << 40;
pub const DEFAULT_PILOT_REPLICAS: usize = 200;
pub const DEFAULT_BOUND_C: f64 = 0.1;
pub const DEFAULT_DIST_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Value,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Loads, validates, executes and writes. Nothing is written unless the
/// config is valid.
pub fn run_path(config: &Path, out_dir: &Path) -> Result<RunOutcome> {
    let cfg = ExperimentConfig::load(config)?;
    run(&cfg, out_dir)
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let (rows, summary) = execute(cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let csv_path = out_dir.join(cfg.csv_name());
    let summary_path = out_dir.join(cfg.summary_name());
    write_csv(&csv_path, &rows)?;
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&summary_path, text + "\n").map_err(|e| CliError::io(&summary_path, e))?;
    Ok(RunOutcome {
        rows,
        summary,
        csv_path,
        summary_path,
    })
}

/// Runs the experiment without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    match cfg.experiment {
        ExperimentKind::TimeConstant => time_constant(cfg),
        ExperimentKind::UpperTail => upper_tail(cfg),
        ExperimentKind::Slab => slab(cfg),
        ExperimentKind::SumTail => sum_tail(cfg),
        ExperimentKind::AnomalousScan => anomalous_scan(cfg),
        ExperimentKind::DistCheck => {
            let samples = cfg.samples.unwrap_or(DEFAULT_DIST_SAMPLES);
            let report = dist_check(&cfg.model, samples, cfg.seed)?;
            let summary = json!({
                "experiment": cfg.experiment.as_str(),
                "report": report,
            });
            Ok((Vec::new(), summary))
        }
    }
}

struct RowBase<'a> {
    cfg: &'a ExperimentConfig,
    model: String,
    r: Option<f64>,
    alpha: Option<f64>,
}

impl<'a> RowBase<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            model: model_label(&cfg.model),
            r: cfg.model.stretch_exponent(),
            alpha: model_alpha(&cfg.model),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &self,
        xi: Option<f64>,
        n: u32,
        estimator: &str,
        p_hat: f64,
        stderr: f64,
        log_p: f64,
        bound: Option<f64>,
        walltime_ms: u64,
    ) -> ResultRow {
        ResultRow {
            experiment: self.cfg.experiment.as_str().to_string(),
            model: self.model.clone(),
            d: self.cfg.d,
            r: self.r,
            alpha: self.alpha,
            xi,
            n,
            estimator: estimator.to_string(),
            p_hat,
            stderr,
            log_p,
            bound,
            seed: self.cfg.seed,
            walltime_ms,
        }
    }

    fn tail_row(&self, xi: Option<f64>, n: u32, e: &TailEstimate, walltime_ms: u64) -> ResultRow {
        self.row(
            xi,
            n,
            e.estimator_kind.as_str(),
            e.p_hat,
            e.stderr,
            e.log_p,
            None,
            walltime_ms,
        )
    }
}

fn millis(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn replicas(cfg: &ExperimentConfig) -> usize {
    cfg.replicas.expect("validated") as usize
}

struct MuHat {
    value: f64,
    stderr: Option<f64>,
    summary: Value,
}

fn resolve_mu(cfg: &ExperimentConfig) -> Result<MuHat> {
    match cfg.mu.as_ref().expect("validated") {
        MuConfig::Value(v) => Ok(MuHat {
            value: *v,
            stderr: None,
            summary: json!({ "mu_hat": v, "source": "config" }),
        }),
        MuConfig::Estimate(e) => {
            let seed = e.seed.unwrap_or(cfg.seed.wrapping_add(MU_SEED_OFFSET));
            let est = estimate_time_constant(&cfg.model, cfg.d, &[e.n], e.replicas, seed)?;
            Ok(MuHat {
                value: est.mu_hat,
                stderr: Some(est.stderr),
                summary: json!({
                    "mu_hat": est.mu_hat,
                    "stderr": est.stderr,
                    "n": e.n,
                    "replicas": e.replicas,
                    "seed": seed,
                    "source": "estimated",
                }),
            })
        }
    }
}

fn regressor(model: &EdgeWeightModel) -> Regressor {
    match model {
        EdgeWeightModel::LogPerturbed(m) => Regressor::LogPerturbed(*m),
        other => Regressor::Power(other.stretch_exponent().unwrap_or(1.0)),
    }
}

/// Fits `log p̂` against the model's regressor over the finite points.
fn fit_points(model: &EdgeWeightModel, points: &[(f64, f64)]) -> Option<RateFit> {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1.is_finite()).collect();
    fit_rate_with(&finite, &regressor(model)).ok()
}

fn fit_json(fit: &Option<RateFit>) -> Value {
    match fit {
        Some(f) => json!({
            "r": f.r,
            "slope": f.slope,
            "intercept": f.intercept,
            "slope_stderr": f.slope_stderr,
            "points": f.points.len(),
        }),
        None => Value::Null,
    }
}

fn estimate_json(n: u32, e: &TailEstimate) -> Value {
    json!({
        "n": n,
        "threshold": e.threshold,
        "p_hat": e.p_hat,
        "log_p": e.log_p,
        "stderr": e.stderr,
        "rel_stderr": e.rel_stderr,
        "replicas": e.replicas,
        "hits": e.hits,
        "tilt_shift": e.tilt_shift,
    })
}

/// Tilt shifts for each `n`, or `None` for the naive estimator.
fn tilt_shifts(
    cfg: &ExperimentConfig,
    default_rule: NamedShift,
    excess: f64,
    thresholds: &[f64],
    pilot_means: impl FnOnce(usize) -> Result<Vec<f64>>,
) -> Result<Option<Vec<f64>>> {
    if cfg.estimator.kind == EstimatorKind::Naive {
        return Ok(None);
    }
    let rule = cfg.estimator.shift.unwrap_or(ShiftRule::Named(default_rule));
    let shifts = match rule {
        ShiftRule::Fixed(s) => vec![s; cfg.n_list.len()],
        ShiftRule::Named(NamedShift::Excess) => {
            cfg.n_list.iter().map(|&n| excess * n as f64).collect()
        }
        ShiftRule::Named(NamedShift::Pilot) => {
            let pilot = cfg.estimator.pilot_replicas.unwrap_or(DEFAULT_PILOT_REPLICAS);
            let means = pilot_means(pilot)?;
            thresholds
                .iter()
                .zip(means)
                .map(|(thr, m)| (thr - m).max(1.0))
                .collect()
        }
    };
    Ok(Some(shifts))
}

fn mean_time(s: &TailSamples) -> f64 {
    s.times.iter().sum::<f64>() / s.times.len() as f64
}

fn time_constant(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    let start = Instant::now();
    let est = estimate_time_constant(&cfg.model, cfg.d, &cfg.n_list, replicas(cfg), cfg.seed)?;
    let wall = millis(start);
    let base = RowBase::new(cfg);
    let rows = est
        .per_n_means
        .iter()
        .map(|p| {
            base.row(
                None,
                p.n,
                "mean",
                p.ratio(),
                p.ratio_stderr(),
                p.ratio().ln(),
                None,
                wall,
            )
        })
        .collect();
    let summary = json!({
        "experiment": cfg.experiment.as_str(),
        "model": cfg.model,
        "d": cfg.d,
        "seed": cfg.seed,
        "mu_hat": est.mu_hat,
        "stderr": est.stderr,
        "n_used": est.n_used,
        "replicas": est.replicas,
        "per_n_means": est.per_n_means,
        "subadditive_within_2se": est.subadditive_within(2.0),
        "walltime_ms": wall,
    });
    Ok((rows, summary))
}

fn upper_tail(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    let xi = cfg.xi.expect("validated");
    let start = Instant::now();
    let mu = resolve_mu(cfg)?;
    let q = TailQuery::new(cfg.model.clone(), cfg.d, xi, cfg.n_list[0], mu.value)?;
    let thresholds: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64 * (mu.value + xi)).collect();
    let reps = replicas(cfg);
    let shifts = tilt_shifts(cfg, NamedShift::Excess, xi, &thresholds, |pilot| {
        let s = tail_sweep(&q, &cfg.n_list, None, pilot, cfg.seed.wrapping_add(reps as u64))?;
        Ok(s.iter().map(mean_time).collect())
    })?;
    let w = cfg.estimator.mixture_weight.unwrap_or(DEFAULT_MIXTURE_WEIGHT);
    let tilt = shifts.as_deref().map(|s| (s, w));
    let samples = tail_sweep(&q, &cfg.n_list, tilt, reps, cfg.seed)?;
    let wall = millis(start);

    let base = RowBase::new(cfg);
    let estimates: Vec<TailEstimate> = samples
        .iter()
        .zip(&thresholds)
        .map(|(s, thr)| s.estimate_at(*thr, false))
        .collect();
    let rows: Vec<ResultRow> = cfg
        .n_list
        .iter()
        .zip(&estimates)
        .map(|(&n, e)| base.tail_row(Some(xi), n, e, wall))
        .collect();
    let points_at = |mu_value: f64| -> Vec<(f64, f64)> {
        cfg.n_list
            .iter()
            .zip(&samples)
            .map(|(&n, s)| (n as f64, s.estimate_at(n as f64 * (mu_value + xi), false).log_p))
            .collect()
    };
    let fit = fit_points(&cfg.model, &points_at(mu.value));
    let target = rate_target(&cfg.model, cfg.d, xi);
    let relative_error = match (&fit, target) {
        (Some(f), Some(RateTarget::Limit { slope })) => Some(f.relative_error(slope)),
        _ => None,
    };
    let spread = mu.stderr.map(|se| {
        let lo = fit_points(&cfg.model, &points_at(mu.value - 2.0 * se)).map(|f| f.slope);
        let hi = fit_points(&cfg.model, &points_at(mu.value + 2.0 * se)).map(|f| f.slope);
        json!({
            "mu_minus_2se": lo,
            "mu_plus_2se": hi,
            "spread": lo.zip(hi).map(|(a, b)| (a - b).abs()),
        })
    });
    let summary = json!({
        "experiment": cfg.experiment.as_str(),
        "model": cfg.model,
        "d": cfg.d,
        "xi": xi,
        "seed": cfg.seed,
        "replicas": reps,
        "estimator": {
            "kind": cfg.estimator.kind,
            "mixture_weight": shifts.as_ref().map(|_| w),
            "shifts": shifts,
        },
        "mu": mu.summary,
        "estimates": cfg.n_list.iter().zip(&estimates).map(|(&n, e)| estimate_json(n, e)).collect::<Vec<_>>(),
        "fit": fit_json(&fit),
        "target": target,
        "relative_error": relative_error,
        "slope_spread": spread,
        "walltime_ms": wall,
    });
    Ok((rows, summary))
}

fn slab(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    let eps = cfg.epsilon.expect("validated");
    let k = cfg.half_width.expect("validated");
    let start = Instant::now();
    let mu = resolve_mu(cfg)?;
    let reps = replicas(cfg);
    let thresholds: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64 * (mu.value + eps)).collect();
    let shifts = tilt_shifts(cfg, NamedShift::Pilot, eps, &thresholds, |pilot| {
        cfg.n_list
            .iter()
            .map(|&n| {
                let s = slab_samples(
                    &cfg.model,
                    cfg.d,
                    k,
                    n,
                    pilot,
                    cfg.seed.wrapping_add(reps as u64),
                    None,
                )?;
                Ok(mean_time(&s))
            })
            .collect()
    })?;
    let w = cfg.estimator.mixture_weight.unwrap_or(DEFAULT_MIXTURE_WEIGHT);
    let base = RowBase::new(cfg);
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for (j, (&n, thr)) in cfg.n_list.iter().zip(&thresholds).enumerate() {
        let t = Instant::now();
        let tilt = shifts.as_ref().map(|s| (s[j], w));
        let s = slab_samples(&cfg.model, cfg.d, k, n, reps, cfg.seed, tilt)?;
        let e = s.estimate_at(*thr, true);
        rows.push(base.tail_row(Some(eps), n, &e, millis(t)));
        estimates.push(e);
    }
    let wall = millis(start);
    let points: Vec<(f64, f64)> = cfg
        .n_list
        .iter()
        .zip(&estimates)
        .map(|(&n, e)| (n as f64, e.log_p))
        .collect();
    let strictly_decreasing = points.iter().all(|p| p.1.is_finite())
        && points.windows(2).all(|w| w[1].1 < w[0].1);
    let fit = fit_points(&cfg.model, &points);
    let summary = json!({
        "experiment": cfg.experiment.as_str(),
        "model": cfg.model,
        "d": cfg.d,
        "half_width": k,
        "epsilon": eps,
        "seed": cfg.seed,
        "replicas": reps,
        "estimator": {
            "kind": cfg.estimator.kind,
            "mixture_weight": shifts.as_ref().map(|_| w),
            "shifts": shifts,
        },
        "mu": mu.summary,
        "estimates": cfg.n_list.iter().zip(&estimates).map(|(&n, e)| estimate_json(n, e)).collect::<Vec<_>>(),
        "strictly_decreasing": strictly_decreasing,
        "fit": fit_json(&fit),
        "walltime_ms": wall,
    });
    Ok((rows, summary))
}

fn sum_tail(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    let k = cfg.k.expect("validated");
    let c = cfg.bound_c.unwrap_or(DEFAULT_BOUND_C);
    let start = Instant::now();
    let ns: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64).collect();
    let draws = cfg.replicas.expect("validated");
    let points = sum_tail_check(&cfg.model, k, &ns, draws, cfg.seed, c)?;
    let wall = millis(start);
    let base = RowBase::new(cfg);
    let rows = cfg
        .n_list
        .iter()
        .zip(&points)
        .map(|(&n, p)| base.row(None, n, "naive", p.p_hat, p.stderr, p.p_hat.ln(), p.bound, wall))
        .collect();
    let summary = json!({
        "experiment": cfg.experiment.as_str(),
        "model": cfg.model,
        "k": k,
        "bound_c": c,
        "seed": cfg.seed,
        "replicas": draws,
        "points": points.iter().map(|p| json!({
            "n": p.n,
            "p_hat": p.p_hat,
            "stderr": p.stderr,
            "hits": p.hits,
            "bound": p.bound,
            "within_bound": p.within_bound(),
        })).collect::<Vec<_>>(),
        "all_within_bound": points.iter().all(|p| p.within_bound()),
        "walltime_ms": wall,
    });
    Ok((rows, summary))
}

fn anomalous_scan(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Value)> {
    let xi = cfg.xi.expect("validated");
    let start = Instant::now();
    let scales: Vec<u32> = if cfg.n_list.is_empty() {
        subsequence_scales().into_iter().map(|(_, n)| n as u32).collect()
    } else {
        cfg.n_list.clone()
    };
    let base = RowBase::new(cfg);
    let mut rows = Vec::new();
    let mut maps = Vec::new();
    for &n in &scales {
        let p = interval_map(&cfg.model, cfg.d, xi, n as u64)?;
        let log_p = p.single_edge_rate * n as f64;
        rows.push(base.row(
            Some(xi),
            n,
            "interval-map",
            log_p.exp(),
            0.0,
            log_p,
            None,
            millis(start),
        ));
        maps.push(p);
    }
    let mut mc = Value::Null;
    if cfg.replicas.is_some() {
        let mu = resolve_mu(cfg)?;
        let reps = replicas(cfg);
        let q = TailQuery::new(cfg.model.clone(), cfg.d, xi, scales[0], mu.value)?;
        let shifts: Vec<f64> = scales.iter().map(|&n| xi * n as f64).collect();
        let w = cfg.estimator.mixture_weight.unwrap_or(DEFAULT_MIXTURE_WEIGHT);
        let t = Instant::now();
        let samples = tail_sweep(&q, &scales, Some((&shifts, w)), reps, cfg.seed)?;
        let wall = millis(t);
        let estimates: Vec<TailEstimate> = scales
            .iter()
            .zip(&samples)
            .map(|(&n, s)| s.estimate_at(n as f64 * (mu.value + xi), false))
            .collect();
        for (&n, e) in scales.iter().zip(&estimates) {
            rows.push(base.tail_row(Some(xi), n, e, wall));
        }
        mc = json!({
            "mu": mu.summary,
            "replicas": reps,
            "estimates": scales.iter().zip(&estimates).map(|(&n, e)| {
                let mut v = estimate_json(n, e);
                v["rate"] = json!(e.log_p / n as f64);
                v
            }).collect::<Vec<_>>(),
        });
    }
    let summary = json!({
        "experiment": cfg.experiment.as_str(),
        "model": cfg.model,
        "d": cfg.d,
        "xi": xi,
        "seed": cfg.seed,
        "interval_map": maps,
        "target": rate_target(&cfg.model, cfg.d, xi),
        "monte_carlo": mc,
        "walltime_ms": millis(start),
    });
    Ok((rows, summary))
}
