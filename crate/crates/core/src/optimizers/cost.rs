//! Closed-form query counts.
//!
//! With `c` the per-component estimator cost (2 for `Rand`, `q + 1` for
//! `AvgRand`, `2d` for `Coord`), `S = ⌈T/m⌉`:
//!
//! * ZO-SVRG: `c · (n·S + 2·b·T)`. Each epoch spends one full pass, and each
//!   inner step estimates the mini-batch gradient at both `x_k^s` and `x_0^s`.
//! * ZO-SGD: `c · b · T`.
//!
//! The first-order counterparts count component-gradient calls with `c = 1`.

use crate::estimators::EstimatorSpec;

pub fn zo_svrg_queries(spec: &EstimatorSpec, n: usize, d: usize, b: usize, iterations: usize, m: usize) -> u64 {
    spec.queries_per_component(d) * svrg_gradient_calls(n, b, iterations, m)
}

pub fn zo_sgd_queries(spec: &EstimatorSpec, d: usize, b: usize, iterations: usize) -> u64 {
    spec.queries_per_component(d) * sgd_gradient_calls(b, iterations)
}

pub fn svrg_gradient_calls(n: usize, b: usize, iterations: usize, m: usize) -> u64 {
    let epochs = iterations.div_ceil(m) as u64;
    n as u64 * epochs + 2 * b as u64 * iterations as u64
}

pub fn sgd_gradient_calls(b: usize, iterations: usize) -> u64 {
    (b * iterations) as u64
}
