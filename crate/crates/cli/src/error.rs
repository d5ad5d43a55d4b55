use polargauge::GaugeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::NonConvergence(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<GaugeError> for CliError {
    fn from(e: GaugeError) -> Self {
        match e {
            GaugeError::InvalidInput(_)
            | GaugeError::NonFinite { .. }
            | GaugeError::DimensionMismatch { .. }
            | GaugeError::Unsupported(_)
            | GaugeError::Infeasible(_) => CliError::Usage(e.to_string()),
            GaugeError::DykstraNotConverged { .. }
            | GaugeError::BracketFailure { .. }
            | GaugeError::LineSearchFailure { .. }
            | GaugeError::NoFeasiblePoint => CliError::NonConvergence(e.to_string()),
            GaugeError::NonDifferentiable { .. } => CliError::Invariant(e.to_string()),
        }
    }
}
