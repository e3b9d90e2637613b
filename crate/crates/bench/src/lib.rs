//! Fixtures shared by the kernel benchmarks.

use fpp_core::{EdgeWeightModel, Environment, PassageQuery, Site, TailQuery};

pub fn exponential_env(d: usize, seed: u64) -> Environment {
    Environment::new(d, EdgeWeightModel::exponential(1.0).unwrap(), seed).unwrap()
}

/// `0 → n·e1` on the full lattice.
pub fn axis_query(d: usize, n: i32) -> PassageQuery {
    PassageQuery::new(Site::origin(d), Site::on_axis(d, 0, n))
}

/// Upper-tail query used by the acceptance rate experiments.
pub fn tail_query(r: f64, n: u32) -> TailQuery {
    TailQuery::new(EdgeWeightModel::weibull(1.0, r).unwrap(), 2, 3.0, n, 0.42).unwrap()
}

pub fn models() -> Vec<(&'static str, EdgeWeightModel)> {
    vec![
        ("weibull_r1", EdgeWeightModel::weibull(1.0, 1.0).unwrap()),
        ("weibull_r05", EdgeWeightModel::weibull(1.0, 0.5).unwrap()),
        ("logperturbed", EdgeWeightModel::log_perturbed(1.0, 0.5, 0.3).unwrap()),
        ("anomalous", EdgeWeightModel::anomalous(1.0, 2.0).unwrap()),
    ]
}
