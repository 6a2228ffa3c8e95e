use thiserror::Error;

/// Errors raised by bound evaluation and region algebra.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity argument {0} is outside the domain x > -1")]
    Domain(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("constraint set does not bound both rate axes")]
    Unbounded,

    #[error("malformed constraint set: {0}")]
    MalformedConstraints(String),

    #[error("regions are sampled on different grids")]
    GridMismatch,

    #[error("region is empty")]
    EmptyRegion,

    #[error("infeasible transform: {0}")]
    InfeasibleTransform(String),
}

pub type Result<T> = std::result::Result<T, BoundsError>;
