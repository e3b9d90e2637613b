//! Distribution checks: Kolmogorov–Smirnov distance and density quadrature.

use crate::distributions::EdgeWeightModel;
use crate::error::{Error, Result};
use crate::mixing;

/// `sup_t |F_n(t) − F(t)|` for the empirical CDF of `samples`. Sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// `count` inverse-CDF draws driven by the counter stream `(seed, i)`.
pub fn sample_stream(model: &EdgeWeightModel, count: usize, seed: u64) -> Vec<f64> {
    (0..count)
        .map(|i| model.quantile_unchecked(mixing::uniform(seed, i as u128)))
        .collect()
}

/// KS distance between `count` draws and the model's analytic CDF.
pub fn sampler_ks(model: &EdgeWeightModel, count: usize, seed: u64) -> Result<f64> {
    if !model.is_continuous() {
        return Err(Error::NoDensity);
    }
    let mut xs = sample_stream(model, count, seed);
    Ok(ks_statistic(&mut xs, |t| model.cdf(t).unwrap_or(0.0)))
}

/// Numerical integral of the density over its effective support.
///
/// Anomalous laws are integrated piece by piece over the tower intervals up
/// to `a_5`; Weibull-type laws over `[0, T*]` with `S(T*) < 1e−12`. On `[0, 1]`
/// the substitution `x = u^{1/r}` removes the `x^{r−1}` singularity.
pub fn density_quadrature(model: &EdgeWeightModel) -> Result<f64> {
    let f = |x: f64| model.density(x).unwrap_or(0.0);
    let breaks: Vec<f64> = match model {
        EdgeWeightModel::Degenerate(_) => return Err(Error::NoDensity),
        EdgeWeightModel::Anomalous(m) => m.tower().values().iter().map(|&a| a as f64).collect(),
        _ => {
            let mut t_star = 1.0;
            while model.survival(t_star)? >= 1e-12 {
                t_star *= 2.0;
            }
            let mut b = vec![0.0];
            let mut x = 1.0;
            while x < t_star {
                b.push(x);
                x *= 4.0;
            }
            b.push(t_star);
            b
        }
    };
    let r = match model {
        EdgeWeightModel::Anomalous(_) => 1.0,
        _ => model.stretch_exponent().unwrap_or(1.0),
    };
    let g = |u: f64| {
        let v = f(u.powf(1.0 / r)) * u.powf(1.0 / r - 1.0) / r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    Ok(breaks
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 && r < 1.0 {
                quadrature::integrate(g, 0.0, w[1].powf(r), 1e-13).integral
            } else {
                quadrature::integrate(f, w[0], w[1], 1e-13).integral
            }
        })
        .sum())
}
