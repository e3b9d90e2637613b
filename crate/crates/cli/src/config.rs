//! Experiment configuration files.
//!
//! A config is one JSON object; see `configs/schema.json` for the full
//! grammar and `configs/` for worked examples. Unknown keys are rejected.

use std::path::Path;

use fpp_core::{EdgeWeightModel, EstimatorKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TimeConstant,
    UpperTail,
    Slab,
    SumTail,
    AnomalousScan,
    DistCheck,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::TimeConstant => "time-constant",
            ExperimentKind::UpperTail => "upper-tail",
            ExperimentKind::Slab => "slab",
            ExperimentKind::SumTail => "sum-tail",
            ExperimentKind::AnomalousScan => "anomalous-scan",
            ExperimentKind::DistCheck => "dist-check",
        }
    }
}

/// How the tilt shift is chosen for each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShiftRule {
    /// The same shift at every `n`.
    Fixed(f64),
    Named(NamedShift),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedShift {
    /// `ξ·n` (upper tail) or `ε·n` (slab).
    Excess,
    /// Threshold minus the mean passage time of a naive pilot run.
    Pilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default = "default_kind")]
    pub kind: EstimatorKind,
    #[serde(default)]
    pub shift: Option<ShiftRule>,
    #[serde(default)]
    pub mixture_weight: Option<f64>,
    /// Naive replicas for the pilot shift rule.
    #[serde(default)]
    pub pilot_replicas: Option<usize>,
}

fn default_kind() -> EstimatorKind {
    EstimatorKind::Naive
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            kind: EstimatorKind::Naive,
            shift: None,
            mixture_weight: None,
            pilot_replicas: None,
        }
    }
}

/// Either a fixed `μ̂` or instructions to estimate it first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuConfig {
    Value(f64),
    Estimate(MuEstimate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuEstimate {
    pub n: u32,
    pub replicas: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub summary: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: EdgeWeightModel,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub n_list: Vec<u32>,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub replicas: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub mu: Option<MuConfig>,
    /// Number of summands (sum-tail).
    #[serde(default)]
    pub k: Option<usize>,
    /// Slab half-width `K`.
    #[serde(default)]
    pub half_width: Option<u32>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// The constant `c` of the sum-tail bound `exp(−(1−c)·rate)`.
    #[serde(default)]
    pub bound_c: Option<f64>,
    /// Sample count (dist-check).
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_d() -> usize {
    2
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| bad(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn csv_name(&self) -> String {
        self.output
            .csv
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.experiment.as_str()))
    }

    pub fn summary_name(&self) -> String {
        self.output
            .summary
            .clone()
            .unwrap_or_else(|| format!("{}.summary.json", self.experiment.as_str()))
    }

    fn require_replicas(&self, min: u64) -> Result<u64> {
        match self.replicas {
            Some(r) if r >= min => Ok(r),
            Some(r) => Err(bad(format!("replicas must be at least {min}, got {r}"))),
            None => Err(bad(format!("{} needs `replicas`", self.experiment.as_str()))),
        }
    }

    fn require_n_list(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(bad(format!("{} needs a non-empty `n_list`", self.experiment.as_str())));
        }
        if self.n_list.contains(&0) || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("`n_list` must be positive and strictly ascending"));
        }
        Ok(())
    }

    fn require_mu(&self) -> Result<()> {
        match &self.mu {
            None => Err(bad(format!("{} needs `mu`", self.experiment.as_str()))),
            Some(MuConfig::Value(v)) if !(*v >= 0.0 && v.is_finite()) => {
                Err(bad(format!("mu must be a nonnegative number, got {v}")))
            }
            Some(MuConfig::Estimate(e)) if e.n == 0 || e.replicas < 30 => Err(bad(
                "mu estimation needs n > 0 and at least 30 replicas",
            )),
            _ => Ok(()),
        }
    }

    fn require_positive(&self, name: &str, v: Option<f64>) -> Result<f64> {
        match v {
            Some(x) if x > 0.0 && x.is_finite() => Ok(x),
            Some(x) => Err(bad(format!("`{name}` must be positive, got {x}"))),
            None => Err(bad(format!("{} needs `{name}`", self.experiment.as_str()))),
        }
    }

    fn check_estimator(&self) -> Result<()> {
        let e = &self.estimator;
        if let Some(w) = e.mixture_weight {
            if !(w > 0.0 && w <= 1.0) {
                return Err(bad(format!("mixture_weight must lie in (0,1], got {w}")));
            }
        }
        if let Some(ShiftRule::Fixed(s)) = e.shift {
            if !(s > 0.0 && s.is_finite()) {
                return Err(bad(format!("shift must be positive, got {s}")));
            }
        }
        if e.kind == EstimatorKind::Tilted && !self.model.is_continuous() {
            return Err(bad("the tilted estimator needs a law with a density"));
        }
        if e.kind == EstimatorKind::Naive && (e.shift.is_some() || e.mixture_weight.is_some()) {
            return Err(bad("shift and mixture_weight only apply to the tilted estimator"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=fpp_core::lattice::MAX_DIM).contains(&self.d) {
            return Err(bad(format!("d must lie in 2..=5, got {}", self.d)));
        }
        self.check_estimator()?;
        match self.experiment {
            ExperimentKind::TimeConstant => {
                self.require_n_list()?;
                self.require_replicas(30)?;
            }
            ExperimentKind::UpperTail => {
                self.require_n_list()?;
                self.require_replicas(1)?;
                self.require_positive("xi", self.xi)?;
                self.require_mu()?;
            }
            ExperimentKind::Slab => {
                self.require_n_list()?;
                self.require_replicas(1)?;
                self.require_positive("epsilon", self.epsilon)?;
                self.require_mu()?;
                let k = self
                    .half_width
                    .ok_or_else(|| bad("slab needs `half_width`"))?;
                if self.n_list[0] < k {
                    return Err(bad("slab needs every n ≥ half_width"));
                }
            }
            ExperimentKind::SumTail => {
                self.require_n_list()?;
                self.require_replicas(1)?;
                if !self.k.is_some_and(|k| k >= 1) {
                    return Err(bad("sum-tail needs `k` ≥ 1"));
                }
                if let Some(c) = self.bound_c {
                    if !(c > 0.0 && c < 1.0) {
                        return Err(bad(format!("bound_c must lie in (0,1), got {c}")));
                    }
                }
            }
            ExperimentKind::AnomalousScan => {
                if !matches!(self.model, EdgeWeightModel::Anomalous(_)) {
                    return Err(bad("anomalous-scan needs an anomalous model"));
                }
                self.require_positive("xi", self.xi)?;
                if !self.n_list.is_empty() {
                    self.require_n_list()?;
                }
                if self.replicas.is_some() {
                    self.require_mu()?;
                }
            }
            ExperimentKind::DistCheck => {
                if !self.model.is_continuous() {
                    return Err(bad("dist-check needs a law with a density"));
                }
                if self.samples == Some(0) {
                    return Err(bad("samples must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UPPER: &str = r#"{
        "experiment": "upper-tail",
        "model": {"kind": "weibull", "alpha": 1.0, "r": 1.0},
        "d": 2,
        "n_list": [16, 24, 32, 48, 64],
        "xi": 3.0,
        "replicas": 1000,
        "seed": 1,
        "estimator": {"kind": "tilted", "mixture_weight": 0.5},
        "mu": {"n": 64, "replicas": 50}
    }"#;

    #[test]
    fn parses_upper_tail() {
        let c = ExperimentConfig::from_json(UPPER).unwrap();
        assert_eq!(c.experiment, ExperimentKind::UpperTail);
        assert_eq!(c.estimator.kind, EstimatorKind::Tilted);
        assert_eq!(
            c.mu,
            Some(MuConfig::Estimate(MuEstimate {
                n: 64,
                replicas: 50,
                seed: None
            }))
        );
        assert_eq!(c.csv_name(), "upper-tail.csv");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = UPPER.replace("\"seed\": 1,", "\"seed\": 1, \"colour\": 3,");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(CliError::Config(_))));
        let text = UPPER.replace("\"mixture_weight\": 0.5", "\"mixture\": 0.5");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn semantic_checks() {
        let no_mu = UPPER.replace(",\n        \"mu\": {\"n\": 64, \"replicas\": 50}", "");
        assert!(ExperimentConfig::from_json(&no_mu).is_err());
        let descending = UPPER.replace("[16, 24, 32, 48, 64]", "[64, 16]");
        assert!(ExperimentConfig::from_json(&descending).is_err());
        let bad_w = UPPER.replace("0.5}", "1.5}");
        assert!(ExperimentConfig::from_json(&bad_w).is_err());
        let bad_model = UPPER.replace("\"r\": 1.0", "\"r\": 1.5");
        assert!(ExperimentConfig::from_json(&bad_model).is_err());
        let degenerate_tilt = UPPER.replace(
            "{\"kind\": \"weibull\", \"alpha\": 1.0, \"r\": 1.0}",
            "{\"kind\": \"degenerate\", \"value\": 1.0}",
        );
        assert!(ExperimentConfig::from_json(&degenerate_tilt).is_err());
    }

    #[test]
    fn shift_rules() {
        let fixed = UPPER.replace("\"mixture_weight\": 0.5", "\"shift\": 12.5");
        let c = ExperimentConfig::from_json(&fixed).unwrap();
        assert_eq!(c.estimator.shift, Some(ShiftRule::Fixed(12.5)));
        let pilot = UPPER.replace("\"mixture_weight\": 0.5", "\"shift\": \"pilot\"");
        let c = ExperimentConfig::from_json(&pilot).unwrap();
        assert_eq!(c.estimator.shift, Some(ShiftRule::Named(NamedShift::Pilot)));
    }
}
