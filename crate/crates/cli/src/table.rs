//! Side-by-side comparison of completed experiments: measured and
//! closed-form query totals, iterations needed to reach a common loss
//! threshold, and the dominant terms of each method's convergence rate.

use std::fmt::Write as _;

use zokit_core::optimizers::{sgd_gradient_calls, svrg_gradient_calls, zo_sgd_queries, zo_svrg_queries};
use zokit_core::sampling::delta_n;
use zokit_core::theory::{dominant_rate_terms, zo_sgd_rate, RateTerms, Variant};
use zokit_core::EstimatorSpec;

use crate::config::Algorithm;
use crate::runner::{estimator_for, ExperimentResult};

/// The threshold is this multiple of the best loss any run reaches.
pub const THRESHOLD_FACTOR: f64 = 1.2;

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub label: String,
    pub algorithm: Option<Algorithm>,
    /// Mean total queries over completed seeds.
    pub measured_queries: Option<f64>,
    pub formula_queries: Option<u64>,
    /// Mean first iteration whose loss is at most the threshold, over the
    /// seeds that reach it.
    pub iterations_to_threshold: Option<f64>,
    pub seeds_reaching: usize,
    pub seeds_completed: usize,
    pub rate: Option<RateTerms>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1 {
    pub threshold: f64,
    pub rows: Vec<Table1Row>,
}

/// Closed-form total for one run of `result`'s configuration.
pub fn formula_queries(result: &ExperimentResult) -> u64 {
    let c = &result.config;
    let (n, d, b, t, m) = (result.n, result.d, c.batch_size, c.iterations, c.epoch_len);
    match (c.algorithm, estimator_for(c, d)) {
        (Algorithm::Svrg, _) => svrg_gradient_calls(n, b, t, m),
        (Algorithm::Sgd, _) => sgd_gradient_calls(b, t),
        (Algorithm::ZoSgd, Some(spec)) => zo_sgd_queries(&spec, d, b, t),
        (_, Some(spec)) => zo_svrg_queries(&spec, n, d, b, t, m),
        (_, None) => unreachable!("zeroth-order algorithms always have an estimator"),
    }
}

fn rate_terms(result: &ExperimentResult) -> Option<RateTerms> {
    let c = &result.config;
    let delta = delta_n(c.sampling, c.batch_size, result.n) as f64;
    let variant = match estimator_for(c, result.d)? {
        _ if c.algorithm == Algorithm::ZoSgd => return Some(zo_sgd_rate(result.d, c.iterations)),
        EstimatorSpec::Rand { .. } => Variant::Rand,
        EstimatorSpec::AvgRand { q, .. } => Variant::AvgRand { q },
        EstimatorSpec::Coord { .. } => Variant::Coord,
    };
    Some(dominant_rate_terms(variant, result.d, c.iterations, c.batch_size, delta))
}

/// Builds the table; `None` entries become rows with every measurement
/// missing.
pub fn emit_table1(runs: &[(String, Option<&ExperimentResult>)]) -> Table1 {
    let best = runs
        .iter()
        .filter_map(|(_, r)| *r)
        .flat_map(|r| r.outcomes.iter().filter(|o| !o.diverged))
        .flat_map(|o| o.trace.records.iter().map(|rec| rec.loss))
        .fold(f64::INFINITY, f64::min);
    let threshold = THRESHOLD_FACTOR * best;

    let rows = runs
        .iter()
        .map(|(label, result)| {
            let Some(result) = result else {
                return Table1Row {
                    label: label.clone(),
                    algorithm: None,
                    measured_queries: None,
                    formula_queries: None,
                    iterations_to_threshold: None,
                    seeds_reaching: 0,
                    seeds_completed: 0,
                    rate: None,
                };
            };
            let done: Vec<_> = result.outcomes.iter().filter(|o| !o.diverged).collect();
            let hits: Vec<f64> = done
                .iter()
                .filter_map(|o| o.trace.records.iter().find(|r| r.loss <= threshold).map(|r| r.iteration as f64))
                .collect();
            Table1Row {
                label: label.clone(),
                algorithm: Some(result.config.algorithm),
                measured_queries: (!done.is_empty()).then_some(result.summary.total_queries.mean),
                formula_queries: Some(formula_queries(result)),
                iterations_to_threshold: (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64),
                seeds_reaching: hits.len(),
                seeds_completed: done.len(),
                rate: rate_terms(result),
            }
        })
        .collect();
    Table1 { threshold, rows }
}

impl Table1 {
    /// CSV with `-` marking missing entries.
    pub fn to_csv(&self) -> String {
        fn cell<T: std::fmt::Display>(v: Option<T>) -> String {
            v.map_or_else(|| "-".to_string(), |v| v.to_string())
        }
        let mut out = String::from(
            "label,algo,measured_queries,formula_queries,iterations_to_threshold,seeds_reaching,seeds_completed,rate_iteration_term,rate_batch_term\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.label,
                cell(r.algorithm),
                cell(r.measured_queries),
                cell(r.formula_queries),
                cell(r.iterations_to_threshold),
                r.seeds_reaching,
                r.seeds_completed,
                cell(r.rate.map(|t| t.iteration)),
                cell(r.rate.map(|t| t.batch)),
            );
        }
        let _ = writeln!(out, "# threshold={}", self.threshold);
        out
    }
}
