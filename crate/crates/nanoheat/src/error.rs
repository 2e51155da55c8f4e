//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NanoheatError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undamped pole at resonance: eps_p not finite at omega = {omega}")]
    PoleAtResonance { omega: f64 },

    #[error("lossless medium at omega = {omega}: Im(eps_p) = 0, Q undefined")]
    LosslessMedium { omega: f64 },

    #[error("regime violation: {0}")]
    InvalidRegime(String),

    #[error("Green kernel evaluated at coincident points")]
    SingularPoint,

    #[error("linear system near-singular (condition estimate {cond:.3e}); perturb the damping")]
    NearSingularSystem { cond: f64 },

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("eigensolve failed: {0}")]
    EigenFailure(String),

    #[error("requested subspace is empty at this resolution (rank {rank})")]
    EmptySubspace { rank: usize },

    #[error("quadrature did not reach tolerance: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonconvergence { achieved: f64, requested: f64 },

    #[error("cannot fit log-log slope: nonpositive value {value:.3e} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
