use serde::Serialize;

use crate::distributions::{EdgeWeightModel, LogPerturbedModel};
use crate::error::{Error, Result};

/// Regressor used against `log p̂`.
#[derive(Debug, Clone, PartialEq)]
pub enum Regressor {
    /// `n^r`.
    Power(f64),
    /// `b(n)·n^r` for the log-perturbed family.
    LogPerturbed(LogPerturbedModel),
}

impl Regressor {
    pub fn value(&self, n: f64) -> f64 {
        match self {
            Regressor::Power(r) => n.powf(*r),
            Regressor::LogPerturbed(m) => m.rate_at(n) * n.powf(m.r()),
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            Regressor::Power(r) => *r,
            Regressor::LogPerturbed(m) => m.r(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub r: f64,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// `(n, log p̂)` as given.
    pub points: Vec<(f64, f64)>,
}

impl RateFit {
    pub fn relative_error(&self, target: f64) -> f64 {
        ((self.slope - target) / target).abs()
    }
}

/// Ordinary least squares of `log_p` on `n^r`.
pub fn fit_rate(points: &[(f64, f64)], r: f64) -> Result<RateFit> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("regressor power must lie in (0,1], got {r}")));
    }
    fit_rate_with(points, &Regressor::Power(r))
}

pub fn fit_rate_with(points: &[(f64, f64)], regressor: &Regressor) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "rate fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|(n, lp)| !n.is_finite() || *n <= 0.0 || !lp.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite or non-positive point {p:?}")));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("rate fit needs distinct n".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| regressor.value(p.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let m = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar) * (x - x_bar)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("degenerate regressor".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    let s2 = ssr / (m - 2.0);
    let slope_stderr = (s2 / sxx).sqrt();
    let intercept_stderr = (s2 * (1.0 / m + x_bar * x_bar / sxx)).sqrt();
    Ok(RateFit {
        r: regressor.exponent(),
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        points: points.to_vec(),
    })
}

/// The theoretical value of `lim n^{−r} log P(T(0,n e_1) > n(μ+ξ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateTarget {
    /// `−2dαξ^r`. For the log-perturbed family the regressor is `b(n)·n^r`
    /// and the limit is `−2dξ^r`.
    Limit { slope: f64 },
    /// No limit; the liminf and limsup along the tower subsequences.
    Oscillating { liminf: f64, limsup: f64 },
}

pub fn rate_target(model: &EdgeWeightModel, d: usize, xi: f64) -> Option<RateTarget> {
    let two_d = 2.0 * d as f64;
    match model {
        EdgeWeightModel::Weibull(m) => Some(RateTarget::Limit {
            slope: -two_d * m.alpha() * xi.powf(m.r()),
        }),
        EdgeWeightModel::LogPerturbed(m) => Some(RateTarget::Limit {
            slope: -two_d * xi.powf(m.r()),
        }),
        EdgeWeightModel::Anomalous(m) => Some(RateTarget::Oscillating {
            liminf: -two_d * m.alpha2() * xi,
            limsup: -two_d * m.alpha1() * xi,
        }),
        EdgeWeightModel::Degenerate(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lines_are_recovered() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|n| (n as f64, -5.0 * n as f64)).collect();
        let f = fit_rate(&pts, 1.0).unwrap();
        assert!((f.slope + 5.0).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!(f.slope_stderr < 1e-12);

        let pts: Vec<(f64, f64)> = [4.0, 9.0, 16.0, 25.0, 36.0]
            .iter()
            .map(|&n: &f64| (n, -2.0 * n.sqrt() + 0.75))
            .collect();
        let f = fit_rate(&pts, 0.5).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let same = vec![(4.0, -1.0); 5];
        assert!(fit_rate(&same, 1.0).is_err());
        let few = vec![(1.0, -1.0), (2.0, -2.0), (3.0, -3.0)];
        assert!(fit_rate(&few, 1.0).is_err());
        let inf = vec![(1.0, -1.0), (2.0, f64::NEG_INFINITY), (3.0, -3.0), (4.0, -4.0)];
        assert!(fit_rate(&inf, 1.0).is_err());
    }

    #[test]
    fn log_perturbed_regressor() {
        let m = LogPerturbedModel::new(1.0, 0.5, 0.3).unwrap();
        let reg = Regressor::LogPerturbed(m);
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&n| (n, -3.0 * reg.value(n)))
            .collect();
        let f = fit_rate_with(&pts, &reg).unwrap();
        assert!((f.slope + 3.0).abs() < 1e-12);
    }

    #[test]
    fn targets() {
        let w = EdgeWeightModel::exponential(1.0).unwrap();
        assert_eq!(rate_target(&w, 2, 3.0), Some(RateTarget::Limit { slope: -12.0 }));
        let w = EdgeWeightModel::weibull(1.0, 0.5).unwrap();
        match rate_target(&w, 2, 3.0).unwrap() {
            RateTarget::Limit { slope } => assert!((slope + 4.0 * 3f64.sqrt()).abs() < 1e-12),
            _ => unreachable!(),
        }
        let a = EdgeWeightModel::anomalous(1.0, 2.0).unwrap();
        assert_eq!(
            rate_target(&a, 2, 1.0),
            Some(RateTarget::Oscillating { liminf: -8.0, limsup: -4.0 })
        );
    }
}
