use fpp_core::estimators::interval_log_slopes;
use fpp_core::stats::{density_quadrature, sampler_ks};
use fpp_core::EdgeWeightModel;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Grid on which the sandwich constants are computed.
pub const SANDWICH_RANGE: (f64, f64) = (1.0, 100.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSlope {
    pub index: usize,
    pub lower: u64,
    pub upper: u64,
    /// `−d/dx ln f` measured inside the interval.
    pub log_slope: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub lo: f64,
    pub hi: f64,
    pub c4: f64,
    pub c5: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistReport {
    pub model: EdgeWeightModel,
    pub samples: usize,
    pub seed: u64,
    pub ks: f64,
    pub quadrature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<IntervalSlope>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich: Option<Sandwich>,
}

pub fn dist_check(model: &EdgeWeightModel, samples: usize, seed: u64) -> Result<DistReport> {
    if !model.is_continuous() {
        return Err(CliError::Runtime(
            "dist-check: the degenerate law has no density; its law is exact by construction"
                .into(),
        ));
    }
    if samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let ks = sampler_ks(model, samples, seed)?;
    let quadrature = density_quadrature(model)?;
    let (intervals, sandwich) = match model {
        EdgeWeightModel::Anomalous(m) => {
            let slopes = interval_log_slopes(model)?
                .into_iter()
                .map(|(index, lower, upper, log_slope)| IntervalSlope {
                    index,
                    lower,
                    upper,
                    log_slope,
                    alpha: if index % 2 == 0 { m.alpha2() } else { m.alpha1() },
                })
                .collect();
            let (lo, hi) = SANDWICH_RANGE;
            let (c4, c5) = m.sandwich_constants(lo, hi)?;
            (Some(slopes), Some(Sandwich { lo, hi, c4, c5 }))
        }
        _ => (None, None),
    };
    Ok(DistReport {
        model: model.clone(),
        samples,
        seed,
        ks,
        quadrature,
        intervals,
        sandwich,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anomalous_report() {
        let m = EdgeWeightModel::anomalous(1.0, 2.0).unwrap();
        let r = dist_check(&m, 20_000, 3).unwrap();
        assert!((r.quadrature - 1.0).abs() < 1e-9);
        let iv = r.intervals.unwrap();
        let find = |lo: u64| iv.iter().find(|i| i.lower == lo).unwrap().log_slope;
        assert!((find(4) - 1.0).abs() < 1e-12);
        assert!((find(2) - 2.0).abs() < 1e-12);
        let s = r.sandwich.unwrap();
        assert!(s.c4 > 0.0 && s.c5 >= s.c4);
    }

    #[test]
    fn degenerate_is_refused() {
        let m = EdgeWeightModel::degenerate(1.0).unwrap();
        assert!(dist_check(&m, 10, 0).is_err());
    }
}
