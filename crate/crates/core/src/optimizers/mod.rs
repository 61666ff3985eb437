//! SVRG-family optimizers and their traces.
//!
//! All runs share one recording convention: after iteration `t` (1-based)
//! the trace holds the state *after* the update, i.e. `f(x_{t})`, the
//! optional `‖∇f(x_t)‖²`, and the cumulative query count including the cost
//! of that iteration. The candidate set for the returned point is the
//! pre-update iterates `{x_k^s}`, k = 0..m−1, kept in [`RunTrace::iterates`].
//!
//! Randomness is drawn from sub-streams keyed by `(seed, epoch, step, role)`
//! so a run is a pure function of its configuration.

mod cost;
mod first_order;
mod zo;

pub use cost::{sgd_gradient_calls, svrg_gradient_calls, zo_sgd_queries, zo_svrg_queries};
pub use first_order::{run_sgd_first_order, run_svrg_first_order, svrg_blend};
pub use zo::{run_zo_sgd, run_zo_svrg, zo_blend};

use crate::error::{Error, Result};
use crate::estimators::EstimatorSpec;
use crate::objective::Objective;
use crate::point::Point;
use crate::rng::{Rng, Role};
use crate::sampling::{validate_batch, SamplingMode};

/// Iterates beyond this norm, or losses beyond this magnitude, abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// One step size per inner index `k`; length must equal the epoch length.
    PerStep(Vec<f64>),
}

impl StepSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Constant(eta) => *eta,
            StepSchedule::PerStep(etas) => etas[k % etas.len()],
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let ok = |e: f64| e.is_finite() && e >= 0.0;
        match self {
            StepSchedule::Constant(e) if !ok(*e) => Err(Error::Config(format!("invalid step size {e}"))),
            StepSchedule::PerStep(v) if v.len() != m => {
                Err(Error::Config(format!("per-step schedule has {} entries for epoch length {m}", v.len())))
            }
            StepSchedule::PerStep(v) if !v.iter().all(|&e| ok(e)) => {
                Err(Error::Config("step sizes must be finite and nonnegative".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputRule {
    UniformRandomIterate,
    LastIterate,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Total iterations `T`.
    pub iterations: usize,
    /// Epoch length `m`.
    pub epoch_len: usize,
    pub step: StepSchedule,
    pub batch_size: usize,
    pub sampling: SamplingMode,
    pub estimator: EstimatorSpec,
    pub x0: Point,
    pub seed: u64,
    pub output_rule: OutputRule,
    /// Log `‖∇f‖²` per record when the objective exposes gradients.
    pub record_grad_norm: bool,
}

impl RunConfig {
    pub fn new(x0: Point, estimator: EstimatorSpec) -> Self {
        RunConfig {
            iterations: 100,
            epoch_len: 10,
            step: StepSchedule::Constant(1e-2),
            batch_size: 1,
            sampling: SamplingMode::WithReplacement,
            estimator,
            x0,
            seed: 0,
            output_rule: OutputRule::UniformRandomIterate,
            record_grad_norm: true,
        }
    }

    /// `S = ⌈T/m⌉`; the last epoch is truncated when `m ∤ T`.
    pub fn epochs(&self) -> usize {
        self.iterations.div_ceil(self.epoch_len)
    }

    /// Inner steps executed in epoch `s` (1-based).
    pub fn epoch_steps(&self, s: usize) -> usize {
        let done = (s - 1) * self.epoch_len;
        self.epoch_len.min(self.iterations.saturating_sub(done))
    }

    pub fn validate(&self, obj: &Objective) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("total iterations T must be at least 1".into()));
        }
        if self.epoch_len == 0 {
            return Err(Error::Config("epoch length m must be at least 1".into()));
        }
        if self.x0.dim() != obj.dim() {
            return Err(Error::Dimension(format!("x0 has dimension {}, objective has {}", self.x0.dim(), obj.dim())));
        }
        self.step.validate(self.epoch_len)?;
        validate_batch(obj.n(), self.batch_size, self.sampling)?;
        self.estimator.validate(obj.dim())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    /// Epoch `s`, 1-based.
    pub epoch: usize,
    /// Inner index `k` of the step that produced this record.
    pub inner: usize,
    /// Iterations completed, 1-based.
    pub iteration: usize,
    pub loss: f64,
    pub grad_norm_sq: Option<f64>,
    /// Cumulative function queries (gradient calls for first-order runs).
    pub queries: u64,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// Pre-update iterates `x_k^s`, the candidate set for the output.
    pub iterates: Vec<Point>,
    pub initial_loss: f64,
    pub initial_grad_norm_sq: Option<f64>,
    pub final_point: Point,
    pub output_point: Point,
}

impl RunTrace {
    pub fn total_queries(&self) -> u64 {
        self.records.last().map_or(0, |r| r.queries)
    }

    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(self.initial_loss, |r| r.loss)
    }
}

/// Picks the returned point: a uniform draw over the pre-update iterates, or
/// the final point `x_m^S`.
pub fn select_output(trace: &RunTrace, rule: OutputRule, rng: &mut Rng) -> Result<Point> {
    if trace.iterates.is_empty() {
        return Err(Error::Input("cannot select an output from an empty trace".into()));
    }
    Ok(match rule {
        OutputRule::UniformRandomIterate => trace.iterates[rng.below(trace.iterates.len())].clone(),
        OutputRule::LastIterate => trace.final_point.clone(),
    })
}

/// Shared bookkeeping for the iteration loops.
struct Recorder<'a> {
    obj: &'a Objective,
    cfg: &'a RunConfig,
    log_grad: bool,
    trace: RunTrace,
    queries: u64,
}

impl<'a> Recorder<'a> {
    fn new(obj: &'a Objective, cfg: &'a RunConfig) -> Self {
        let log_grad = cfg.record_grad_norm && obj.has_gradient();
        let x0 = cfg.x0.clone();
        let trace = RunTrace {
            records: Vec::with_capacity(cfg.iterations),
            iterates: Vec::with_capacity(cfg.iterations),
            initial_loss: obj.loss(&x0),
            initial_grad_norm_sq: if log_grad { obj.grad_norm_sq(&x0) } else { None },
            final_point: x0.clone(),
            output_point: x0,
        };
        Recorder { obj, cfg, log_grad, trace, queries: 0 }
    }

    fn add_queries(&mut self, q: u64) {
        self.queries += q;
    }

    /// Stores the pre-update iterate.
    fn begin_step(&mut self, x: &Point) {
        self.trace.iterates.push(x.clone());
    }

    /// Records the post-update state; fails with the partial trace on divergence.
    fn end_step(&mut self, epoch: usize, inner: usize, x: &Point) -> Result<()> {
        let loss = if x.is_finite() { self.obj.loss(x) } else { f64::NAN };
        if !x.is_finite() || x.norm() > DIVERGENCE_LIMIT || !loss.is_finite() || loss.abs() > DIVERGENCE_LIMIT {
            return Err(self.diverged());
        }
        let grad_norm_sq = if self.log_grad { self.obj.grad_norm_sq(x) } else { None };
        let iteration = self.trace.records.len() + 1;
        self.trace.records.push(TraceRecord { epoch, inner, iteration, loss, grad_norm_sq, queries: self.queries });
        self.trace.final_point = x.clone();
        Ok(())
    }

    /// Partial trace ending at the last finite iterate.
    fn diverged(&mut self) -> Error {
        let mut trace = std::mem::replace(
            &mut self.trace,
            RunTrace {
                records: vec![],
                iterates: vec![],
                initial_loss: 0.0,
                initial_grad_norm_sq: None,
                final_point: Point::zeros(1),
                output_point: Point::zeros(1),
            },
        );
        trace.output_point = trace.final_point.clone();
        Error::Diverged { trace: Box::new(trace) }
    }

    /// Converts evaluation blow-ups mid-run into divergence.
    fn absorb(&mut self, e: Error) -> Error {
        match e {
            Error::NonFiniteValue { .. } => self.diverged(),
            other => other,
        }
    }

    fn finish(mut self) -> Result<RunTrace> {
        let mut rng = Rng::for_stream(self.cfg.seed, 0, 0, Role::Output);
        self.trace.output_point = select_output(&self.trace, self.cfg.output_rule, &mut rng)?;
        Ok(self.trace)
    }
}

/// `x ← x − η v`
fn descend(x: &mut Point, eta: f64, v: &[f64]) {
    x.axpy(-eta, v);
}
