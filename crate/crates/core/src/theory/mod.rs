//! Computable artifacts of the ZO-SVRG convergence analysis: the backward
//! `c_k` recursion with its `γ_k`/`χ_k` companions for each estimator, the
//! recommended parameter setting, the resulting bound on `E‖∇f(x̄)‖²`, the
//! second-moment envelope of the blended estimate, and a sample-based
//! control-variate analyzer.
//!
//! Everything here is a pure function of value types.

mod bounds;
mod coefficients;
mod control_variate;

pub use bounds::{dominant_rate_terms, prop1_envelope, theorem_bound, zo_sgd_rate, BoundReport, RateTerms};
pub use coefficients::{coefficients, corollary1_params, CoefficientTrace, Corollary1Params};
pub use control_variate::{control_variate_analysis, ControlVariateReport};

use crate::error::{Error, Result};
use crate::sampling::{delta_n, SamplingMode};

/// Constants from the smoothness and bounded-variance assumptions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothnessParams {
    /// Lipschitz constant of every component gradient.
    pub l: f64,
    /// Bound on the component-gradient variance.
    pub sigma_sq: f64,
}

impl SmoothnessParams {
    pub fn new(l: f64, sigma_sq: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("L must be finite and positive, got {l}")));
        }
        if !(sigma_sq.is_finite() && sigma_sq >= 0.0) {
            return Err(Error::Config(format!("sigma^2 must be finite and nonnegative, got {sigma_sq}")));
        }
        Ok(SmoothnessParams { l, sigma_sq })
    }
}

/// Which estimator the analysis is specialized to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Rand,
    AvgRand { q: usize },
    Coord,
}

/// Inputs of the coefficient recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryParams {
    pub variant: Variant,
    pub d: usize,
    pub b: usize,
    pub n: usize,
    pub mode: SamplingMode,
    pub mu: f64,
    /// Step sizes `η_0..η_{m−1}`.
    pub eta: Vec<f64>,
    /// Positive parameters `β_0..β_{m−1}`.
    pub beta: Vec<f64>,
    /// Total iterations `T`, used by the bound.
    pub iterations: usize,
}

impl TheoryParams {
    /// Constant `η` and `β` over an epoch of length `m`.
    #[allow(clippy::too_many_arguments)]
    pub fn constant(
        variant: Variant,
        d: usize,
        b: usize,
        n: usize,
        mode: SamplingMode,
        mu: f64,
        eta: f64,
        beta: f64,
        m: usize,
        iterations: usize,
    ) -> Self {
        TheoryParams { variant, d, b, n, mode, mu, eta: vec![eta; m], beta: vec![beta; m], iterations }
    }

    /// Builds parameters from a recommended setting.
    pub fn from_corollary1(
        variant: Variant,
        c1: &Corollary1Params,
        b: usize,
        n: usize,
        mode: SamplingMode,
        iterations: usize,
    ) -> Self {
        Self::constant(variant, c1.d, b, n, mode, c1.mu, c1.eta, c1.beta, c1.m, iterations)
    }

    pub fn m(&self) -> usize {
        self.eta.len()
    }

    pub fn delta_n(&self) -> f64 {
        f64::from(delta_n(self.mode, self.b, self.n))
    }

    fn validate(&self) -> Result<()> {
        let m = self.m();
        if m == 0 {
            return Err(Error::Config("epoch length m must be at least 1".into()));
        }
        if self.beta.len() != m {
            return Err(Error::Config(format!("{} beta values for epoch length {m}", self.beta.len())));
        }
        if self.d == 0 || self.b == 0 || self.n == 0 {
            return Err(Error::Config("d, b and n must all be at least 1".into()));
        }
        if let Variant::AvgRand { q: 0 } = self.variant {
            return Err(Error::Config("q must be at least 1".into()));
        }
        if !self.beta.iter().all(|&b| b.is_finite() && b > 0.0) {
            return Err(Error::Config("every beta_k must be positive".into()));
        }
        if !self.eta.iter().all(|&e| e.is_finite() && e >= 0.0) {
            return Err(Error::Config("step sizes must be finite and nonnegative".into()));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::Config("mu must be finite and nonnegative".into()));
        }
        Ok(())
    }
}
