//! SVRG's blend `ĝ = ĝ_0 − η(c − E[c])` viewed as a control variate.
//!
//! With trace covariances `tr cov(ĝ_0)`, `tr cov(c)` and `tr cov(ĝ_0, c)`,
//! the variance-minimizing coefficient is `η* = tr cov(ĝ_0, c) / tr cov(c)`
//! and the minimized variance is `tr cov(ĝ_0)·(1 − ρ²)` with
//! `ρ = tr cov(ĝ_0, c) / √(tr cov(ĝ_0)·tr cov(c))`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlVariateReport {
    pub eta_star: f64,
    /// `tr cov(ĝ) / tr cov(ĝ_0)` measured on the blended samples at `η*`.
    pub variance_ratio: f64,
    /// Trace correlation `ρ(ĝ_0, c)`.
    pub rho: f64,
    pub trace_cov_raw: f64,
    pub trace_cov_control: f64,
    pub trace_cov_cross: f64,
}

fn mean(samples: &[&[f64]], d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    for s in samples {
        m.iter_mut().zip(s.iter()).for_each(|(a, v)| *a += v);
    }
    let n = samples.len() as f64;
    m.iter_mut().for_each(|a| *a /= n);
    m
}

/// Unbiased sample trace-covariance `Σ_ℓ cov(a_ℓ, b_ℓ)`.
fn trace_cov(a: &[&[f64]], b: &[&[f64]], ma: &[f64], mb: &[f64]) -> f64 {
    let n = a.len() as f64;
    let s: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            x.iter().zip(ma).zip(y.iter().zip(mb)).map(|((xi, mx), (yi, my))| (xi - mx) * (yi - my)).sum::<f64>()
        })
        .sum();
    s / (n - 1.0)
}

/// Analyzes paired draws `(ĝ_0, c)`.
pub fn control_variate_analysis(samples: &[(Vec<f64>, Vec<f64>)]) -> Result<ControlVariateReport> {
    if samples.len() < 2 {
        return Err(Error::Analysis("need at least two paired samples".into()));
    }
    let d = samples[0].0.len();
    if d == 0 || samples.iter().any(|(g, c)| g.len() != d || c.len() != d) {
        return Err(Error::Analysis("paired samples must share one nonzero dimension".into()));
    }
    let raw: Vec<&[f64]> = samples.iter().map(|(g, _)| g.as_slice()).collect();
    let ctl: Vec<&[f64]> = samples.iter().map(|(_, c)| c.as_slice()).collect();
    let m_raw = mean(&raw, d);
    let m_ctl = mean(&ctl, d);
    let t_raw = trace_cov(&raw, &raw, &m_raw, &m_raw);
    let t_ctl = trace_cov(&ctl, &ctl, &m_ctl, &m_ctl);
    let t_cross = trace_cov(&raw, &ctl, &m_raw, &m_ctl);
    if t_ctl.is_nan() || t_ctl <= 0.0 {
        return Err(Error::Analysis("control variate has zero covariance".into()));
    }
    if t_raw.is_nan() || t_raw <= 0.0 {
        return Err(Error::Analysis("raw estimate has zero covariance".into()));
    }
    let eta_star = t_cross / t_ctl;
    let rho = t_cross / (t_raw.sqrt() * t_ctl.sqrt());

    let blended: Vec<Vec<f64>> = samples
        .iter()
        .map(|(g, c)| g.iter().zip(c.iter().zip(&m_ctl)).map(|(gi, (ci, mc))| gi - eta_star * (ci - mc)).collect())
        .collect();
    let blended_refs: Vec<&[f64]> = blended.iter().map(Vec::as_slice).collect();
    let m_bl = mean(&blended_refs, d);
    let t_bl = trace_cov(&blended_refs, &blended_refs, &m_bl, &m_bl);

    Ok(ControlVariateReport {
        eta_star,
        variance_ratio: t_bl / t_raw,
        rho,
        trace_cov_raw: t_raw,
        trace_cov_control: t_ctl,
        trace_cov_cross: t_cross,
    })
}
