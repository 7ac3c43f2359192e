use num_complex::Complex64;
use thiserror::Error;

use crate::resources::ResourceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("squeezing parameter {0} outside [0, 1)")]
    InvalidLambda(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite {what} at beta = {beta}")]
    NonFinite { what: &'static str, beta: Complex64 },

    #[error("matrix dimension {requested} exceeds the limit of {limit}")]
    DimensionTooLarge { requested: usize, limit: usize },

    #[error(
        "truncation insufficient: tail mass {tail:e} exceeds epsilon {epsilon:e} \
         (dimension {dim}, estimated requirement {required})"
    )]
    Truncation {
        tail: f64,
        epsilon: f64,
        dim: usize,
        required: usize,
    },

    #[error(
        "quadrature did not converge: error estimate {err:e} > {tolerance:e} \
         (order {order}, {centers} centers, width {width})"
    )]
    Convergence {
        err: f64,
        tolerance: f64,
        order: usize,
        centers: usize,
        width: f64,
    },

    #[error("no closed form for {kind:?} resource with this input; use the transfer-operator path")]
    NoClosedForm { kind: ResourceKind },
}
