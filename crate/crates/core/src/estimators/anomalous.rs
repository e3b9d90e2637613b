//! Interval-map checks for the anomalous law at desk-reachable scales.

use serde::Serialize;

use crate::distributions::{AnomalousModel, EdgeWeightModel, Regime};
use crate::error::{Error, Result};

/// Where the single-edge tail at `ξn` sits on the tower, and what it predicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalPrediction {
    pub n: u64,
    pub xi: f64,
    /// `ξ·n`.
    pub point: f64,
    pub regime: Regime,
    /// `−d/dx ln f` at `point`, by finite difference inside the interval.
    pub local_log_slope: f64,
    pub hazard: f64,
    /// `2d·ln S(ξn)/n`, the exponent of "all origin edges exceed `ξn`".
    pub single_edge_rate: f64,
    /// `−2d·α·ξ` with `α` the regime rate.
    pub predicted_rate: f64,
}

fn as_anomalous(model: &EdgeWeightModel) -> Result<&AnomalousModel> {
    match model {
        EdgeWeightModel::Anomalous(m) => Ok(m),
        other => Err(Error::InvalidModel(format!(
            "interval map needs an anomalous law, got {}",
            other.kind()
        ))),
    }
}

pub fn interval_map(model: &EdgeWeightModel, d: usize, xi: f64, n: u64) -> Result<IntervalPrediction> {
    let m = as_anomalous(model)?;
    if !(xi > 0.0) || n == 0 {
        return Err(Error::Domain(format!("need xi > 0 and n > 0, got {xi}, {n}")));
    }
    let point = xi * n as f64;
    let regime = m.regime_at(point);
    let upper = regime.upper.ok_or_else(|| {
        Error::Domain(format!("xi*n = {point} lies past the truncated tower"))
    })? as f64;
    let h = ((upper - point) / 2.0).min(1.0);
    let local_log_slope = (model.log_density(point)? - model.log_density(point + h)?) / h;
    let two_d = 2.0 * d as f64;
    Ok(IntervalPrediction {
        n,
        xi,
        point,
        regime,
        local_log_slope,
        hazard: model.hazard(point)?,
        single_edge_rate: two_d * model.log_survival(point)? / n as f64,
        predicted_rate: -two_d * regime.alpha * xi,
    })
}

/// Decay rate `−d/dx ln f` on each finite tower interval, as
/// `(index, lower, upper, rate)`.
pub fn interval_log_slopes(model: &EdgeWeightModel) -> Result<Vec<(usize, u64, u64, f64)>> {
    let m = as_anomalous(model)?;
    let vals = m.tower().values();
    let mut out = Vec::with_capacity(vals.len() - 1);
    for k in 0..vals.len() - 1 {
        let (a, b) = (vals[k] as f64, vals[k + 1] as f64);
        let x1 = a + (b - a) / 4.0;
        let x2 = a + (b - a) / 2.0;
        let slope = (model.log_density(x1)? - model.log_density(x2)?) / (x2 - x1);
        out.push((k, vals[k], vals[k + 1], slope));
    }
    Ok(out)
}

/// Subsequence scales `a_m²` for `m = 2..=4` with their tower index.
pub fn subsequence_scales() -> Vec<(usize, u64)> {
    (2..=4)
        .map(|m| {
            let a = crate::distributions::tower(m).expect("tower index in range");
            (m, a * a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EdgeWeightModel {
        EdgeWeightModel::anomalous(1.0, 2.0).unwrap()
    }

    #[test]
    fn scales() {
        assert_eq!(subsequence_scales(), vec![(2, 4), (3, 16), (4, 256)]);
    }

    #[test]
    fn slopes_match_regime_rates() {
        let slopes = interval_log_slopes(&model()).unwrap();
        assert_eq!(slopes.len(), 5);
        for (k, _, _, s) in slopes {
            let want = if k % 2 == 0 { 2.0 } else { 1.0 };
            assert!((s - want).abs() < 1e-12, "interval {k}: {s}");
        }
    }

    #[test]
    fn map_at_256() {
        let p = interval_map(&model(), 2, 1.0, 256).unwrap();
        assert_eq!(p.regime.index, 4);
        assert_eq!(p.regime.alpha, 2.0);
        assert!((p.local_log_slope - 2.0).abs() < 1e-12);
        assert!((p.hazard - 2.0).abs() < 1e-9);
        assert_eq!(p.predicted_rate, -8.0);
        assert!((p.single_edge_rate - p.predicted_rate).abs() < 0.01);

        let q = interval_map(&model(), 2, 0.5, 16).unwrap();
        assert_eq!(q.regime.alpha, 1.0);
        assert!((q.local_log_slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_other_laws() {
        let w = EdgeWeightModel::exponential(1.0).unwrap();
        assert!(interval_map(&w, 2, 1.0, 16).is_err());
        assert!(interval_log_slopes(&w).is_err());
    }
}
