use super::{CoefficientTrace, SmoothnessParams, TheoryParams, Variant};

/// The three additive terms of the bound on `E‖∇f(x̄)‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    /// `(f(x̃_0) − f*)/(Tγ̄)`
    pub initial_gap: f64,
    /// `Lμ²/(Tγ̄)`; zero for the coordinate estimator.
    pub smoothing: f64,
    /// `Sχ_m/(Tγ̄)`
    pub variance: f64,
    /// Sum of the terms, `+∞` when the bound is vacuous.
    pub total: f64,
    pub vacuous: bool,
}

pub fn theorem_bound(
    coeffs: &CoefficientTrace,
    f0_minus_fstar: f64,
    params: &TheoryParams,
    smooth: &SmoothnessParams,
) -> BoundReport {
    if coeffs.is_vacuous() {
        return BoundReport {
            initial_gap: f64::INFINITY,
            smoothing: f64::INFINITY,
            variance: f64::INFINITY,
            total: f64::INFINITY,
            vacuous: true,
        };
    }
    let t = params.iterations as f64;
    let epochs = params.iterations.div_ceil(params.m()) as f64;
    let denom = t * coeffs.gamma_bar;
    let initial_gap = f0_minus_fstar / denom;
    let smoothing = match params.variant {
        Variant::Coord => 0.0,
        _ => smooth.l * params.mu * params.mu / denom,
    };
    let variance = epochs * coeffs.chi_sum / denom;
    BoundReport { initial_gap, smoothing, variance, total: initial_gap + smoothing + variance, vacuous: false }
}

/// Upper envelope on `E‖v̂_k^s‖²` for the random estimator:
///
/// `4(b+18δ)d/b·‖∇f‖² + 6(4d+1)L²δ/b·‖x_k − x_0‖² + (6δ+b)L²d²μ²/b + 72dσ²δ/b`
#[allow(clippy::too_many_arguments)]
pub fn prop1_envelope(
    d: usize,
    b: usize,
    l: f64,
    sigma_sq: f64,
    mu: f64,
    delta_n: f64,
    grad_norm_sq: f64,
    dist_sq: f64,
) -> f64 {
    let d = d as f64;
    let b = b as f64;
    4.0 * (b + 18.0 * delta_n) * d / b * grad_norm_sq
        + 6.0 * (4.0 * d + 1.0) * l * l * delta_n / b * dist_sq
        + (6.0 * delta_n + b) * l * l * d * d * mu * mu / b
        + 72.0 * d * sigma_sq * delta_n / b
}

/// Dominant-term decomposition of a convergence rate, constants dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateTerms {
    /// The `T`-dependent term (`d/T`, or `√d/√T` for ZO-SGD).
    pub iteration: f64,
    /// The mini-batch error floor (`δ/b`, `δ/(b·min(d,q))`, or 0).
    pub batch: f64,
}

pub fn dominant_rate_terms(variant: Variant, d: usize, iterations: usize, b: usize, delta_n: f64) -> RateTerms {
    let iteration = d as f64 / iterations as f64;
    let batch = match variant {
        Variant::Rand => delta_n / b as f64,
        Variant::AvgRand { q } => delta_n / (b * d.min(q)) as f64,
        Variant::Coord => 0.0,
    };
    RateTerms { iteration, batch }
}

pub fn zo_sgd_rate(d: usize, iterations: usize) -> RateTerms {
    RateTerms { iteration: (d as f64 / iterations as f64).sqrt(), batch: 0.0 }
}
