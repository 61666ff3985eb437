//! The black-box finite-sum objective `f(x) = (1/n) Σ f_i(x)`.
//!
//! A [`FiniteSum`] describes the problem; an [`Objective`] wraps it with the
//! query accounting and the zeroth-order guard that the optimizers rely on.
//! Three access paths exist:
//!
//! * [`Objective::query`], the only path estimators use. Every call counts.
//! * [`Objective::component_gradient`], the first-order oracle. It fails
//!   while a [`ZoGuard`] is alive.
//! * The instrumentation helpers ([`Objective::loss`],
//!   [`Objective::grad_norm_sq`]) used for trace metrics. They are neither
//!   counted nor trapped and never feed back into an iteration.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::norm_sq;

/// A finite sum of `n` component functions over `R^d`.
pub trait FiniteSum: Send + Sync {
    fn num_components(&self) -> usize;

    fn dim(&self) -> usize;

    fn eval_component(&self, i: usize, x: &[f64]) -> f64;

    /// Whether [`FiniteSum::component_gradient`] returns values.
    fn provides_gradient(&self) -> bool {
        false
    }

    fn component_gradient(&self, _i: usize, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Lipschitz constant of every `∇f_i`, if known.
    fn smoothness(&self) -> Option<f64> {
        None
    }

    /// Bound on `(1/n) Σ ‖∇f_i − ∇f‖²`, if known.
    fn variance_bound(&self) -> Option<f64> {
        None
    }
}

/// Counted, guarded access to a [`FiniteSum`]. Safe to share between threads.
pub struct Objective {
    problem: Arc<dyn FiniteSum>,
    queries: AtomicU64,
    gradient_calls: AtomicU64,
    guards: AtomicUsize,
    tripped: AtomicBool,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("n", &self.n())
            .field("d", &self.dim())
            .field("queries", &self.queries())
            .finish()
    }
}

impl Objective {
    pub fn new(problem: Arc<dyn FiniteSum>) -> Self {
        Objective {
            problem,
            queries: AtomicU64::new(0),
            gradient_calls: AtomicU64::new(0),
            guards: AtomicUsize::new(0),
            tripped: AtomicBool::new(false),
        }
    }

    pub fn from_problem<P: FiniteSum + 'static>(problem: P) -> Self {
        Self::new(Arc::new(problem))
    }

    pub fn problem(&self) -> &Arc<dyn FiniteSum> {
        &self.problem
    }

    pub fn n(&self) -> usize {
        self.problem.num_components()
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.problem.smoothness()
    }

    pub fn variance_bound(&self) -> Option<f64> {
        self.problem.variance_bound()
    }

    /// Evaluates `f_i(x)` and counts one query.
    pub fn query(&self, i: usize, x: &[f64]) -> f64 {
        debug_assert!(i < self.n());
        debug_assert_eq!(x.len(), self.dim());
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.problem.eval_component(i, x)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.gradient_calls.store(0, Ordering::Relaxed);
    }

    pub fn has_gradient(&self) -> bool {
        self.problem.provides_gradient()
    }

    /// First-order oracle `∇f_i(x)`, counted separately from function queries.
    pub fn component_gradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        if self.guards.load(Ordering::SeqCst) > 0 {
            self.tripped.store(true, Ordering::SeqCst);
            return Err(Error::GradientTrap);
        }
        let g = self.problem.component_gradient(i, x).ok_or(Error::MissingGradient)?;
        self.gradient_calls.fetch_add(1, Ordering::Relaxed);
        Ok(g)
    }

    pub fn gradient_calls(&self) -> u64 {
        self.gradient_calls.load(Ordering::Relaxed)
    }

    /// Arms the zeroth-order guard until the returned value is dropped.
    pub fn arm_zo_guard(&self) -> ZoGuard<'_> {
        self.guards.fetch_add(1, Ordering::SeqCst);
        ZoGuard { obj: self }
    }

    /// True once the oracle has been called while a guard was armed.
    pub fn trap_tripped(&self) -> bool {
        self.tripped.load(Ordering::SeqCst)
    }

    /// Uncounted `f(x)` for instrumentation.
    pub fn loss(&self, x: &[f64]) -> f64 {
        let n = self.n();
        (0..n).map(|i| self.problem.eval_component(i, x)).sum::<f64>() / n as f64
    }

    /// Uncounted `∇f(x)` for instrumentation; `None` when the problem has no
    /// gradient channel.
    pub fn full_gradient_uninstrumented(&self, x: &[f64]) -> Option<Vec<f64>> {
        if !self.has_gradient() {
            return None;
        }
        let n = self.n();
        let mut acc = vec![0.0; self.dim()];
        for i in 0..n {
            let g = self.problem.component_gradient(i, x)?;
            acc.iter_mut().zip(&g).for_each(|(a, gi)| *a += gi);
        }
        acc.iter_mut().for_each(|a| *a /= n as f64);
        Some(acc)
    }

    /// Uncounted `‖∇f(x)‖²` for instrumentation.
    pub fn grad_norm_sq(&self, x: &[f64]) -> Option<f64> {
        self.full_gradient_uninstrumented(x).map(|g| norm_sq(&g))
    }
}

/// Scope during which the first-order oracle is forbidden.
#[must_use]
pub struct ZoGuard<'a> {
    obj: &'a Objective,
}

impl Drop for ZoGuard<'_> {
    fn drop(&mut self) {
        self.obj.guards.fetch_sub(1, Ordering::SeqCst);
    }
}
