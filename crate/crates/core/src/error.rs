use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error("tower index {index} beyond stored range (max {max})")]
    TowerRange { index: usize, max: usize },
    #[error("model has no density")]
    NoDensity,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {0} outside the supported range |x| < 2^20")]
    CoordinateOverflow(i64),
    #[error("non-canonical edge: {0}")]
    NonCanonicalEdge(String),
    #[error("not a nearest-neighbour path: {0}")]
    NotAPath(String),
    #[error("region has {sites} sites, brute force limit is {limit}")]
    RegionTooLarge { sites: usize, limit: usize },
    #[error("region is unbounded")]
    UnboundedRegion,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal consistency violated: {0}")]
    Inconsistent(String),
}
