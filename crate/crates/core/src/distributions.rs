//! Edge-weight laws.
//!
//! Every law is described by its survival function `S(t) = P(τ > t)`. Sampling
//! is inverse-transform from a single uniform: `sample(u) = S⁻¹(1 − u)`, so an
//! environment's per-edge uniform maps one-to-one onto the edge weight.
//!
//! Internally survival and density are evaluated in the log domain. The
//! anomalous law in particular reaches probabilities far below `f64::MIN_POSITIVE`
//! on its outer tower intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 − e^x)` for `x ≤ 0`.
pub(crate) fn log1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

fn check_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("quantile level {u} outside (0,1)")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("negative or NaN argument {t}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Survival `exp(−α t^r)` for all `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullModel {
    alpha: f64,
    r: f64,
}

impl WeibullModel {
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidModel(format!("r must lie in (0,1], got {r}")));
        }
        Ok(Self { alpha, r })
    }

    /// Exponential law with rate `alpha` (the Eden growth model).
    pub fn exponential(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    #[inline]
    fn log_survival(&self, t: f64) -> f64 {
        if self.r == 1.0 {
            -self.alpha * t
        } else {
            -self.alpha * t.powf(self.r)
        }
    }

    fn log_density(&self, x: f64) -> f64 {
        if self.r == 1.0 {
            self.alpha.ln() - self.alpha * x
        } else {
            (self.alpha * self.r).ln() + (self.r - 1.0) * x.ln() - self.alpha * x.powf(self.r)
        }
    }

    #[inline]
    fn inverse_log_survival(&self, log_q: f64) -> f64 {
        let base = -log_q / self.alpha;
        if self.r == 1.0 {
            base
        } else if self.r == 0.5 {
            base * base
        } else {
            base.powf(1.0 / self.r)
        }
    }
}

/// The tower `a_0 = 0`, `a_{n+1} = 2^{a_n}`, stored up to `a_5 = 65536`.
///
/// `a_6 = 2^65536` has no fixed-width representation. The anomalous law is
/// truncated at `a_5`: the discarded mass is below `e^{-65536}`, which is zero
/// in double precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSequence {
    values: Vec<u64>,
}

impl TowerSequence {
    pub const MAX_INDEX: usize = 5;

    pub fn standard() -> Self {
        let mut values = vec![0u64];
        for _ in 0..Self::MAX_INDEX {
            let last = *values.last().unwrap();
            values.push(1u64 << last);
        }
        Self { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Result<u64> {
        self.values.get(n).copied().ok_or(Error::TowerRange {
            index: n,
            max: Self::MAX_INDEX,
        })
    }

    /// Index `k` with `a_k ≤ x < a_{k+1}`; `MAX_INDEX` for `x ≥ a_5`.
    pub fn interval_of(&self, x: f64) -> usize {
        self.values[1..]
            .iter()
            .position(|&a| x < a as f64)
            .unwrap_or(Self::MAX_INDEX)
    }

    /// `[a_k, a_{k+1})`, with `None` as the upper end past the stored range.
    pub fn interval(&self, k: usize) -> (u64, Option<u64>) {
        (self.values[k], self.values.get(k + 1).copied())
    }
}

/// `a_n` of the tower sequence.
pub fn tower(n: usize) -> Result<u64> {
    TowerSequence::standard().get(n)
}

/// Position of a point relative to the anomalous law's tower intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub index: usize,
    pub lower: u64,
    pub upper: Option<u64>,
    /// Density decay rate on this interval: `alpha2` for even `index`,
    /// `alpha1` for odd.
    pub alpha: f64,
}

/// Piecewise-exponential density on the tower intervals:
/// `c3·e^{−α2 x}` on `[a_{2n}, a_{2n+1})` and `c3·e^{−α1 x}` on `[a_{2n−1}, a_{2n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalousModel {
    alpha1: f64,
    alpha2: f64,
    tower: TowerSequence,
    c3: f64,
    interval_masses: Vec<f64>,
    /// `ln S(a_k)` for `k = 0..=5`; the last entry is `-inf` (truncation).
    log_tail: Vec<f64>,
}

/// Normalising constant and per-interval masses for the anomalous density.
///
/// Each interval integral is taken in closed form, `(e^{−αa} − e^{−αb})/α`.
/// Intervals past `a_5` are dropped (mass below 1e−300).
pub fn normalize_anomalous(
    alpha1: f64,
    alpha2: f64,
    tower: &TowerSequence,
) -> Result<(f64, Vec<f64>)> {
    positive("alpha1", alpha1)?;
    positive("alpha2", alpha2)?;
    if alpha1 >= alpha2 {
        return Err(Error::InvalidModel(format!(
            "anomalous law needs alpha1 < alpha2, got {alpha1} >= {alpha2}"
        )));
    }
    let raw: Vec<f64> = tower
        .values()
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let rate = if k % 2 == 0 { alpha2 } else { alpha1 };
            let (a, b) = (w[0] as f64, w[1] as f64);
            (-rate * a).exp() * -(-rate * (b - a)).exp_m1() / rate
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let c3 = 1.0 / total;
    Ok((c3, raw.iter().map(|m| m * c3).collect()))
}

impl AnomalousModel {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        let tower = TowerSequence::standard();
        let (c3, interval_masses) = normalize_anomalous(alpha1, alpha2, &tower)?;
        let pieces = interval_masses.len();
        let mut log_tail = vec![f64::NEG_INFINITY; pieces + 1];
        for k in (0..pieces).rev() {
            let rate = if k % 2 == 0 { alpha2 } else { alpha1 };
            let (a, b) = (tower.values()[k] as f64, tower.values()[k + 1] as f64);
            let log_mass = (c3 / rate).ln() - rate * a + log1m_exp(-rate * (b - a));
            log_tail[k] = log_add_exp(log_mass, log_tail[k + 1]);
        }
        Ok(Self {
            alpha1,
            alpha2,
            tower,
            c3,
            interval_masses,
            log_tail,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn tower(&self) -> &TowerSequence {
        &self.tower
    }

    pub fn interval_masses(&self) -> &[f64] {
        &self.interval_masses
    }

    #[inline]
    fn rate_of(&self, k: usize) -> f64 {
        if k.is_multiple_of(2) {
            self.alpha2
        } else {
            self.alpha1
        }
    }

    pub fn regime_at(&self, x: f64) -> Regime {
        let index = self.tower.interval_of(x);
        let (lower, upper) = self.tower.interval(index);
        Regime {
            index,
            lower,
            upper,
            alpha: self.rate_of(index),
        }
    }

    fn log_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = self.tower.interval_of(t);
        if k >= self.interval_masses.len() {
            return f64::NEG_INFINITY;
        }
        let rate = self.rate_of(k);
        let b = self.tower.values()[k + 1] as f64;
        let inner = (self.c3 / rate).ln() - rate * t + log1m_exp(-rate * (b - t));
        log_add_exp(inner, self.log_tail[k + 1])
    }

    fn log_density(&self, x: f64) -> f64 {
        let k = self.tower.interval_of(x);
        self.c3.ln() - self.rate_of(k) * x
    }

    fn inverse_log_survival(&self, log_q: f64) -> f64 {
        let pieces = self.interval_masses.len();
        let k = (0..pieces)
            .find(|&k| log_q > self.log_tail[k + 1])
            .unwrap_or(pieces - 1);
        let rate = self.rate_of(k);
        let (a, b) = (self.tower.values()[k] as f64, self.tower.values()[k + 1] as f64);
        // mass strictly inside the piece above the answer
        let log_rest = if self.log_tail[k + 1] == f64::NEG_INFINITY {
            log_q
        } else {
            log_q + log1m_exp(self.log_tail[k + 1] - log_q)
        };
        let log_e = log_add_exp(log_rest - (self.c3 / rate).ln(), -rate * b);
        (-log_e / rate).clamp(a, b)
    }

    /// Tightest `c4, c5` with `c4·e^{−α2 t} ≤ S(t) ≤ c5·e^{−α1 t}` on `[lo, hi]`.
    ///
    /// On each tower piece the hazard `f/S` is monotone, so `S(t)·e^{κt}` has at
    /// most one interior critical point (where the hazard equals `κ`). The
    /// extremes are therefore attained at piece endpoints or at that point.
    pub fn sandwich_constants(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Domain(format!("bad sandwich range [{lo}, {hi}]")));
        }
        let mut candidates = vec![lo, hi];
        for k in 0..self.interval_masses.len() {
            let (a, b) = (self.tower.values()[k] as f64, self.tower.values()[k + 1] as f64);
            if b <= lo || a >= hi {
                continue;
            }
            candidates.push(a.max(lo));
            candidates.push(b.min(hi));
            let rate = self.rate_of(k);
            let s_b = self.log_tail[k + 1].exp();
            for kappa in [self.alpha1, self.alpha2] {
                if kappa == rate {
                    continue;
                }
                let rhs = kappa * (s_b - self.c3 / rate * (-rate * b).exp());
                let e = rhs / (self.c3 * (1.0 - kappa / rate));
                if e > 0.0 {
                    let t = -e.ln() / rate;
                    if t > a.max(lo) && t < b.min(hi) {
                        candidates.push(t);
                    }
                }
            }
        }
        let mut c4 = f64::INFINITY;
        let mut c5 = 0.0f64;
        for t in candidates {
            let ls = self.log_survival(t);
            c4 = c4.min((ls + self.alpha2 * t).exp());
            c5 = c5.max((ls + self.alpha1 * t).exp());
        }
        Ok((c4, c5))
    }
}

/// Survival `exp(−b(t)·t^r)` with the slowly varying rate
/// `b(t) = α(1 + γ / ln(e + t))`.
///
/// Requires `−1 < γ ≤ r`, which keeps `b > 0` and `b(t)·t^r` increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPerturbedModel {
    alpha: f64,
    r: f64,
    gamma: f64,
}

impl LogPerturbedModel {
    const QUANTILE_RTOL: f64 = 1e-12;

    pub fn new(alpha: f64, r: f64, gamma: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidModel(format!("r must lie in (0,1), got {r}")));
        }
        if !(gamma > -1.0 && gamma <= r) {
            return Err(Error::InvalidModel(format!(
                "gamma must lie in (-1, r], got {gamma}"
            )));
        }
        Ok(Self { alpha, r, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The slowly varying rate `b(t)`.
    pub fn rate_at(&self, t: f64) -> f64 {
        self.alpha * (1.0 + self.gamma / (std::f64::consts::E + t).ln())
    }

    fn exponent(&self, t: f64) -> f64 {
        self.rate_at(t) * t.powf(self.r)
    }

    fn exponent_derivative(&self, t: f64) -> f64 {
        let l = (std::f64::consts::E + t).ln();
        self.alpha
            * (self.r * t.powf(self.r - 1.0) * (1.0 + self.gamma / l)
                - self.gamma * t.powf(self.r) / (l * l * (std::f64::consts::E + t)))
    }

    fn log_density(&self, x: f64) -> f64 {
        self.exponent_derivative(x).ln() - self.exponent(x)
    }

    fn inverse_log_survival(&self, log_q: f64) -> f64 {
        let target = -log_q;
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.exponent(hi) < target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.exponent(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= Self::QUANTILE_RTOL * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Point mass at `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateModel {
    value: f64,
}

impl DegenerateModel {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self { value })
        } else {
            Err(Error::InvalidModel(format!(
                "degenerate value must be finite and nonnegative, got {value}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Any supported edge-weight law.
///
/// Serialises to the config grammar, e.g. `{"kind":"weibull","alpha":1.0,"r":0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub enum EdgeWeightModel {
    Weibull(WeibullModel),
    Anomalous(AnomalousModel),
    LogPerturbed(LogPerturbedModel),
    Degenerate(DegenerateModel),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ModelSpec {
    Weibull { alpha: f64, r: f64 },
    Anomalous { alpha1: f64, alpha2: f64 },
    LogPerturbed { alpha: f64, r: f64, gamma: f64 },
    Degenerate { value: f64 },
}

impl TryFrom<ModelSpec> for EdgeWeightModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        Ok(match spec {
            ModelSpec::Weibull { alpha, r } => Self::Weibull(WeibullModel::new(alpha, r)?),
            ModelSpec::Anomalous { alpha1, alpha2 } => {
                Self::Anomalous(AnomalousModel::new(alpha1, alpha2)?)
            }
            ModelSpec::LogPerturbed { alpha, r, gamma } => {
                Self::LogPerturbed(LogPerturbedModel::new(alpha, r, gamma)?)
            }
            ModelSpec::Degenerate { value } => Self::Degenerate(DegenerateModel::new(value)?),
        })
    }
}

impl From<EdgeWeightModel> for ModelSpec {
    fn from(model: EdgeWeightModel) -> Self {
        match model {
            EdgeWeightModel::Weibull(m) => ModelSpec::Weibull {
                alpha: m.alpha,
                r: m.r,
            },
            EdgeWeightModel::Anomalous(m) => ModelSpec::Anomalous {
                alpha1: m.alpha1,
                alpha2: m.alpha2,
            },
            EdgeWeightModel::LogPerturbed(m) => ModelSpec::LogPerturbed {
                alpha: m.alpha,
                r: m.r,
                gamma: m.gamma,
            },
            EdgeWeightModel::Degenerate(m) => ModelSpec::Degenerate { value: m.value },
        }
    }
}

impl EdgeWeightModel {
    pub fn weibull(alpha: f64, r: f64) -> Result<Self> {
        WeibullModel::new(alpha, r).map(Self::Weibull)
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        Self::weibull(alpha, 1.0)
    }

    pub fn anomalous(alpha1: f64, alpha2: f64) -> Result<Self> {
        AnomalousModel::new(alpha1, alpha2).map(Self::Anomalous)
    }

    pub fn log_perturbed(alpha: f64, r: f64, gamma: f64) -> Result<Self> {
        LogPerturbedModel::new(alpha, r, gamma).map(Self::LogPerturbed)
    }

    pub fn degenerate(value: f64) -> Result<Self> {
        DegenerateModel::new(value).map(Self::Degenerate)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Weibull(_) => "weibull",
            Self::Anomalous(_) => "anomalous",
            Self::LogPerturbed(_) => "logperturbed",
            Self::Degenerate(_) => "degenerate",
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Self::Degenerate(_))
    }

    /// `P(τ = 0)`.
    pub fn atom_at_zero(&self) -> f64 {
        match self {
            Self::Degenerate(m) if m.value == 0.0 => 1.0,
            _ => 0.0,
        }
    }

    /// Whether `P(τ = 0) < p_c(d)` holds. Continuous laws have no atom, and
    /// `p_c(d) < 1` for `d ≥ 2`, so only the point mass at zero fails.
    pub fn below_percolation_atom(&self) -> bool {
        self.atom_at_zero() < 1.0
    }

    /// Tail exponent `r` (1 for the exponential-type anomalous law).
    pub fn stretch_exponent(&self) -> Option<f64> {
        match self {
            Self::Weibull(m) => Some(m.r),
            Self::LogPerturbed(m) => Some(m.r),
            Self::Anomalous(_) => Some(1.0),
            Self::Degenerate(_) => None,
        }
    }

    /// `ln P(τ > t)`.
    pub fn log_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self {
            Self::Weibull(m) => m.log_survival(t),
            Self::Anomalous(m) => m.log_survival(t),
            Self::LogPerturbed(m) => -m.exponent(t),
            Self::Degenerate(m) => {
                if t < m.value {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        })
    }

    /// `P(τ > t)`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        self.log_survival(t).map(f64::exp)
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        self.log_survival(t).map(|ls| -ls.exp_m1())
    }

    pub fn log_density(&self, x: f64) -> Result<f64> {
        check_time(x)?;
        match self {
            Self::Weibull(m) => Ok(m.log_density(x)),
            Self::Anomalous(m) => Ok(m.log_density(x)),
            Self::LogPerturbed(m) => Ok(m.log_density(x)),
            Self::Degenerate(_) => Err(Error::NoDensity),
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        self.log_density(x).map(f64::exp)
    }

    /// `f(t)/S(t)`, the negative log-slope of the survival function.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        Ok((self.log_density(t)? - self.log_survival(t)?).exp())
    }

    /// The `t` with `CDF(t) = u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.quantile_unchecked(u))
    }

    /// Inverse-CDF sample from one uniform; identical to [`Self::quantile`].
    pub fn sample(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }

    /// Quantile without the range check. `u` must lie in (0,1).
    #[inline]
    pub fn quantile_unchecked(&self, u: f64) -> f64 {
        let log_q = (-u).ln_1p();
        match self {
            Self::Weibull(m) => m.inverse_log_survival(log_q),
            Self::Anomalous(m) => m.inverse_log_survival(log_q),
            Self::LogPerturbed(m) => m.inverse_log_survival(log_q),
            Self::Degenerate(m) => m.value,
        }
    }
}
