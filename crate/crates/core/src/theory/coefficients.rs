use crate::error::{Error, Result};

use super::{SmoothnessParams, TheoryParams, Variant};

/// `c_0..c_m`, `γ_0..γ_{m−1}`, `χ_0..χ_{m−1}` and their summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTrace {
    /// Indexed by `k`; `c[m] = 0`.
    pub c: Vec<f64>,
    pub gamma: Vec<f64>,
    pub chi: Vec<f64>,
    /// `γ̄ = min_k γ_k`.
    pub gamma_bar: f64,
    /// `χ_m = Σ_k χ_k`.
    pub chi_sum: f64,
}

impl CoefficientTrace {
    /// The bound is vacuous unless every `γ_k` is positive.
    pub fn is_vacuous(&self) -> bool {
        self.gamma_bar.is_nan() || self.gamma_bar <= 0.0
    }
}

/// One backward step: given `c_{k+1}`, returns `(c_k, γ_k, χ_k)`.
pub(super) fn step(
    variant: Variant,
    p: &TheoryParams,
    s: &SmoothnessParams,
    eta: f64,
    beta: f64,
    c_next: f64,
) -> (f64, f64, f64) {
    let d = p.d as f64;
    let b = p.b as f64;
    let dn = p.delta_n();
    let (l, sig2, mu) = (s.l, s.sigma_sq, p.mu);
    let eta2 = eta * eta;
    let lead = 1.0 - c_next / beta;
    let weight = l / 2.0 + c_next;
    let smoothing = mu * mu * d * d * l * l;

    match variant {
        Variant::Rand => {
            let gamma = 0.5 * lead * eta - weight * (4.0 * d * b + 72.0 * d * dn) / b * eta2;
            let chi =
                lead * smoothing / 4.0 * eta + weight * ((6.0 * dn + b) * smoothing + 72.0 * d * sig2 * dn) / b * eta2;
            let growth = 1.0 + beta * eta + 6.0 * (4.0 * d + 1.0) * l * l * dn * eta2 / b;
            let c = growth * c_next + 3.0 * (4.0 * d + 1.0) * l.powi(3) * dn * eta2 / b;
            (c, gamma, chi)
        }
        Variant::AvgRand { q } => {
            let q = q as f64;
            let gamma = 0.5 * lead * eta - weight * (72.0 * dn + 4.0 * b) * (q + d) / (b * q) * eta2;
            let chi = lead * smoothing / 4.0 * eta
                + weight * ((6.0 * dn + b) * (q + 1.0) * smoothing + 72.0 * (q + d) * sig2 * dn) / (b * q) * eta2;
            let growth = 1.0 + beta * eta + 6.0 * (4.0 * d + 5.0 * q) * l * l * dn / (b * q) * eta2;
            let c = growth * c_next + 3.0 * (4.0 * d + 5.0 * q) * l.powi(3) * dn / (b * q) * eta2;
            (c, gamma, chi)
        }
        Variant::Coord => {
            let gamma = 0.5 * lead * eta - 4.0 * weight * eta2;
            let chi = (0.25 + c_next / beta) * smoothing / 2.0 * eta + weight * smoothing * eta2;
            let growth = 1.0 + beta * eta + 2.0 * d * l * l * dn * eta2 / b;
            let c = growth * c_next + d * l.powi(3) * dn * eta2 / b;
            (c, gamma, chi)
        }
    }
}

/// Runs the recursion backward from `c_m = 0`. A nonpositive `γ̄` is
/// reported through [`CoefficientTrace::is_vacuous`], not as an error.
pub fn coefficients(params: &TheoryParams, smooth: &SmoothnessParams) -> Result<CoefficientTrace> {
    params.validate()?;
    let m = params.m();
    let mut c = vec![0.0; m + 1];
    let mut gamma = vec![0.0; m];
    let mut chi = vec![0.0; m];
    for k in (0..m).rev() {
        let (ck, gk, xk) = step(params.variant, params, smooth, params.eta[k], params.beta[k], c[k + 1]);
        c[k] = ck;
        gamma[k] = gk;
        chi[k] = xk;
    }
    let gamma_bar = gamma.iter().cloned().fold(f64::INFINITY, f64::min);
    let chi_sum = chi.iter().sum();
    Ok(CoefficientTrace { c, gamma, chi, gamma_bar, chi_sum })
}

/// The recommended setting `μ = 1/√(dT)`, `η = ρ/(Ld)`, `β = L`, with the
/// epoch length `⌈d/(κρ)⌉` where `κ` is 31, 55 or 3 for the random,
/// averaged and coordinate estimators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corollary1Params {
    pub d: usize,
    pub mu: f64,
    pub eta: f64,
    pub beta: f64,
    pub m: usize,
}

pub fn corollary1_params(variant: Variant, d: usize, l: f64, rho: f64, iterations: usize) -> Result<Corollary1Params> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Config(format!("rho must lie in (0, 1], got {rho}")));
    }
    if d == 0 || iterations == 0 {
        return Err(Error::Config("d and T must be at least 1".into()));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Config(format!("L must be positive, got {l}")));
    }
    let kappa = match variant {
        Variant::Rand => 31.0,
        Variant::AvgRand { .. } => 55.0,
        Variant::Coord => 3.0,
    };
    let df = d as f64;
    Ok(Corollary1Params {
        d,
        mu: 1.0 / (df * iterations as f64).sqrt(),
        eta: rho / (l * df),
        beta: l,
        m: (df / (kappa * rho)).ceil() as usize,
    })
}
