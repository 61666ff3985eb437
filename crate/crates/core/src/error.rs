use thiserror::Error;

use crate::optimizers::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("component {component} returned a non-finite value at probe point {point:?}")]
    NonFiniteValue { component: usize, point: Vec<f64> },

    #[error("true-gradient evaluator called while the zeroth-order guard is armed")]
    GradientTrap,

    #[error("objective does not expose a gradient evaluator")]
    MissingGradient,

    /// The iteration left the finite region; the partial trace ends at the
    /// last finite iterate.
    #[error("run diverged after {} iterations", .trace.records.len())]
    Diverged { trace: Box<RunTrace> },

    #[error("input error: {0}")]
    Input(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
