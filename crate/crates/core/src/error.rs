use thiserror::Error;

/// Errors raised while building models or solving for steady states.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Time integration hit `max_integration_time` before the residual criterion.
    #[error(
        "evolution did not converge by t = {time:.3e} (last residual {residual:.3e}); \
         the Liouvillian gap may be too small, retry with the null-space method"
    )]
    SlowGap { residual: f64, time: f64 },

    #[error("steady state is not unique ({0}); run check_uniqueness for the low-lying spectrum")]
    DegenerateSteadyState(String),

    #[error("eigensolver failure: {0}")]
    EigenSolver(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
