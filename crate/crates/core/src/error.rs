use thiserror::Error;

use crate::numeric::ExactInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("polytope is empty")]
    Infeasible,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("no feasible points to optimize over")]
    EmptyFeasibleSet,
    #[error("objective takes negative value {value} on the feasible set")]
    NegativeObjective { value: String },
    #[error("grid with m = {m} has about {estimate} points, above the limit of {limit}")]
    RefusedSize {
        m: ExactInt,
        estimate: ExactInt,
        limit: ExactInt,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
