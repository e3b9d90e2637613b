//! First-passage percolation on the hypercubic lattice Z^d.
//!
//! The crate is organised bottom-up:
//!
//! - [`distributions`]: edge-weight laws with analytic survival, density and
//!   quantile functions (Weibull-type, the tower-based anomalous law,
//!   log-perturbed stretched exponentials, and point masses).
//! - [`lattice`]: sites, canonical edges, regions, and [`Environment`], an
//!   implicit i.i.d. weight field keyed by a 64-bit seed.
//! - [`passage`]: Dijkstra over the implicit graph with vertex and edge
//!   restrictions, plus an exhaustive oracle for small regions.
//! - [`estimators`]: time-constant estimation, naive and importance-sampled
//!   upper-tail probabilities, rate regression, and the slab and sum-tail
//!   Monte Carlo checks.
//! - [`stats`]: Kolmogorov–Smirnov statistic and density quadrature.
//!
//! Every random quantity is a pure function of a seed and an index, so results
//! do not depend on traversal order or on how replicas are scheduled.

// NaN must fail parameter checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod lattice;
pub mod mixing;
pub mod passage;
pub mod stats;

pub use distributions::{
    AnomalousModel, DegenerateModel, EdgeWeightModel, LogPerturbedModel, TowerSequence,
    WeibullModel,
};
pub use error::{Error, Result};
pub use estimators::{
    EstimatorKind, RateFit, TailEstimate, TailQuery, TailSamples, TimeConstantEstimate,
};
pub use lattice::{EdgeId, EdgeSet, EdgeWeights, Environment, Region, Site};
pub use passage::{PassageQuery, PassageResult, SearchWorkspace};
