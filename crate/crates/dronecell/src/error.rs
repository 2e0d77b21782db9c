use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside the domain of the model or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature did not converge: residual {residual:.3e} exceeds tolerance {tolerance:.3e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        residual: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    /// An environment table failed schema validation or an invariant.
    #[error("invalid environment table: {0}")]
    EnvironmentSchema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
