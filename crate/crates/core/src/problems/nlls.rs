use crate::error::{Error, Result};
use crate::objective::FiniteSum;
use crate::point::dot;
use crate::rng::{Rng, Role};
use crate::sampling::sample_unit_sphere;

/// Bound on `|h''|` for `h(t) = (y − σ(t))²` with `y ∈ {0, 1}`:
/// `2·max σ'² + 2·max |σ''| = 1/8 + 1/(3√3)`.
pub const NLLS_CURVATURE: f64 = 0.125 + 0.192_450_089_729_875_25;

/// Non-linear least squares with a logistic link:
/// `f_i(x) = (y_i − 1/(1 + exp(−a_iᵀx)))²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NllsProblem {
    features: Vec<f64>,
    labels: Vec<f64>,
    d: usize,
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

impl NllsProblem {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.is_empty() || features.len() != labels.len() {
            return Err(Error::Input(format!(
                "need one label per sample and at least one sample ({} samples, {} labels)",
                features.len(),
                labels.len()
            )));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::Dimension("features must have at least one column".into()));
        }
        if let Some(i) = features.iter().position(|a| a.len() != d) {
            return Err(Error::Dimension(format!("sample {i} has {} features, expected {d}", features[i].len())));
        }
        if let Some(i) = labels.iter().position(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::Input(format!("label of sample {i} is {}, expected 0 or 1", labels[i])));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input("features must be finite".into()));
        }
        Ok(NllsProblem { features: features.into_iter().flatten().collect(), labels, d })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn predict(&self, i: usize, x: &[f64]) -> f64 {
        logistic(dot(self.feature(i), x))
    }

    /// Fraction of samples whose thresholded prediction disagrees with the label.
    pub fn error_rate(&self, x: &[f64]) -> f64 {
        let wrong = (0..self.n()).filter(|&i| (self.predict(i, x) >= 0.5) != (self.labels[i] == 1.0)).count();
        wrong as f64 / self.n() as f64
    }
}

impl FiniteSum for NllsProblem {
    fn num_components(&self) -> usize {
        self.n()
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn eval_component(&self, i: usize, x: &[f64]) -> f64 {
        let r = self.labels[i] - self.predict(i, x);
        r * r
    }

    fn provides_gradient(&self) -> bool {
        true
    }

    fn component_gradient(&self, i: usize, x: &[f64]) -> Option<Vec<f64>> {
        let p = self.predict(i, x);
        let coef = -2.0 * (self.labels[i] - p) * p * (1.0 - p);
        Some(self.feature(i).iter().map(|a| coef * a).collect())
    }

    fn smoothness(&self) -> Option<f64> {
        let max_sq = (0..self.n()).map(|i| dot(self.feature(i), self.feature(i))).fold(0.0, f64::max);
        Some(NLLS_CURVATURE * max_sq)
    }
}

/// Two Gaussian clusters at `±separation·w` around the origin, `w` a planted
/// unit vector, unit-variance isotropic noise. Labels alternate 0/1 so the
/// classes are balanced; `separation = 0` makes labels independent of the
/// features.
pub fn make_synthetic_nlls(rng: &mut Rng, n: usize, d: usize, separation: f64) -> Result<NllsProblem> {
    if n == 0 || d == 0 {
        return Err(Error::Config("synthetic problem needs n, d >= 1".into()));
    }
    let w = sample_unit_sphere(rng, d)?;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = (i % 2) as f64;
        let sign = 2.0 * y - 1.0;
        features.push((0..d).map(|l| separation * sign * w[l] + rng.standard_normal()).collect());
        labels.push(y);
    }
    NllsProblem::new(features, labels)
}

/// Train/test split of one synthetic draw.
#[derive(Clone, Debug)]
pub struct SyntheticPreset {
    pub train: NllsProblem,
    pub test: NllsProblem,
}

pub const SYNTHETIC_N: usize = 500;
pub const SYNTHETIC_D: usize = 145;
pub const SYNTHETIC_SEPARATION: f64 = 1.0;

/// 500 training and 500 test samples in 145 dimensions.
pub fn synthetic_preset(seed: u64) -> Result<SyntheticPreset> {
    let mut rng = Rng::for_stream(seed, 0, 0, Role::Data);
    let all = make_synthetic_nlls(&mut rng, 2 * SYNTHETIC_N, SYNTHETIC_D, SYNTHETIC_SEPARATION)?;
    let split = |range: std::ops::Range<usize>| {
        NllsProblem::new(
            range.clone().map(|i| all.feature(i).to_vec()).collect(),
            range.map(|i| all.label(i)).collect(),
        )
    };
    Ok(SyntheticPreset { train: split(0..SYNTHETIC_N)?, test: split(SYNTHETIC_N..2 * SYNTHETIC_N)? })
}
