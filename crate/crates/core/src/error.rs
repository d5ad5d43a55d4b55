use thiserror::Error;

use crate::Vector;

#[derive(Debug, Error)]
pub enum GaugeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite entry at index {index} in {what}")]
    NonFinite { what: &'static str, index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested primitive is not available for this gauge or input size.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Dykstra projection did not converge after {sweeps} sweeps (last move {residual:e})")]
    DykstraNotConverged {
        sweeps: usize,
        residual: f64,
        last_iterate: Vector,
    },

    #[error("root bracket expansion failed; upper bounds tried: {history:?}")]
    BracketFailure { history: Vec<f64> },

    /// The polar envelope is (numerically) zero at this point, so it has no gradient there.
    #[error("polar envelope is not differentiable here (value {value:e} <= floor {floor:e})")]
    NonDifferentiable { value: f64, floor: f64 },

    #[error("line search failed after {halvings} halvings")]
    LineSearchFailure { halvings: usize },

    #[error("no grid point satisfies the membership test")]
    NoFeasiblePoint,

    #[error("infeasible problem: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, GaugeError>;
