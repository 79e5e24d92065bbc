use thiserror::Error;

/// Errors raised anywhere in the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    /// Feature functions must be integer valued for the polynomial reductions.
    #[error("integrality error: {0}")]
    Integrality(String),

    /// A route was asked to run outside the data it is defined for.
    #[error("convention error: {0}")]
    Convention(String),

    #[error("size guard exceeded: {what} reached {observed} (limit {limit})")]
    SizeGuard {
        what: &'static str,
        observed: usize,
        limit: usize,
    },

    #[error("ideal is not zero-dimensional: {0}")]
    Dimension(String),

    #[error("the system has no solution in the open positive orthant")]
    NoPositiveSolution,

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("boundary target: {0}")]
    Boundary(String),

    #[error("ill-conditioned problem: {0}")]
    Conditioning(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
