use thiserror::Error;

/// Errors raised by the simulator.
///
/// Variants are split so that callers (the CLI in particular) can tell
/// input problems apart from numerical breakdown of a run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QnuteError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported register size: {0}")]
    UnsupportedSize(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(
        "scale-factor radicand 1 + 2*dt*Re<h> = {radicand:e} is not positive; reduce the time step"
    )]
    StepSize { radicand: f64 },

    #[error("linear system is singular: every eigenvalue is below the cutoff {cutoff:e}")]
    SingularSystem { cutoff: f64 },

    #[error("rescaling protocol failed: {0}")]
    ProtocolFailure(String),

    #[error("price domain error: {0}")]
    PriceDomain(String),
}

impl QnuteError {
    /// True for failures of a numerical run, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QnuteError::StepSize { .. }
                | QnuteError::SingularSystem { .. }
                | QnuteError::ProtocolFailure(_)
        )
    }
}

pub type Result<T, E = QnuteError> = std::result::Result<T, E>;
