//! Zeroth-order stochastic variance-reduced optimization.
//!
//! Gradient estimators built from function values only, ZO-SVRG and its
//! baselines, the convergence-bound machinery, and a few built-in
//! black-box problems.

pub mod error;
pub mod estimators;
pub mod objective;
pub mod optimizers;
pub mod point;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{estimate_batch, estimate_component, EstimatorSpec, GradientEstimate};
pub use objective::{FiniteSum, Objective};
pub use optimizers::{
    run_sgd_first_order, run_svrg_first_order, run_zo_sgd, run_zo_svrg, OutputRule, RunConfig, RunTrace, StepSchedule,
    TraceRecord,
};
pub use point::Point;
pub use rng::{Rng, Role};
pub use sampling::{draw_minibatch, sample_unit_sphere, MiniBatch, SamplingMode};
