//! Error type shared by the whole crate.

use crate::jet_algebra::{Degree, Role};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank mismatch: expected m = {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("no product defined for coefficient roles {left} * {right}")]
    RolePairing { left: Role, right: Role },

    #[error("expected a {expected} value, found {found}")]
    RoleMismatch { expected: Role, found: Role },

    #[error(
        "insufficient jet degree in {what}: computing to degree {requested} \
         needs input exact to degree {required}, only {available} is available"
    )]
    InsufficientDegree {
        what: &'static str,
        requested: Degree,
        required: Degree,
        available: Degree,
    },

    #[error("value of series entry {order} has a nonzero piece of degree {degree} > {order}")]
    OrderBound { order: usize, degree: usize },

    #[error("metric is not the identity at the origin")]
    MetricNotIdentityAtOrigin,

    #[error("metric jets fail the normal-coordinate gauge: {0}")]
    GaugeInvalid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
