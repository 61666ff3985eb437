//! Random directions and mini-batches.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rng::Rng;

/// Uniform draw from the unit sphere in `R^d` (normalized Gaussian).
pub fn sample_unit_sphere(rng: &mut Rng, d: usize) -> Result<Point> {
    if d == 0 {
        return Err(Error::Dimension("cannot sample the sphere in R^0".into()));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(Point::from_raw(v.into_iter().map(|x| x / norm).collect()));
        }
    }
}

/// Uniform draw from the unit ball: a sphere draw scaled by `V^{1/d}`,
/// `V ~ U[0, 1)` (inverse of the radial CDF `r^d`).
pub fn sample_unit_ball(rng: &mut Rng, d: usize) -> Result<Point> {
    let mut u = sample_unit_sphere(rng, d)?;
    let r = rng.uniform().powf(1.0 / d as f64);
    u.scale(r);
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    WithReplacement,
    WithoutReplacement,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with" | "with-replacement" | "replace" => Ok(SamplingMode::WithReplacement),
            "without" | "without-replacement" | "no-replace" => Ok(SamplingMode::WithoutReplacement),
            other => Err(Error::Config(format!("unknown sampling mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiniBatch {
    indices: Vec<usize>,
    mode: SamplingMode,
}

impl MiniBatch {
    /// The full batch `[n]` drawn without replacement.
    pub fn full(n: usize) -> Self {
        MiniBatch { indices: (0..n).collect(), mode: SamplingMode::WithoutReplacement }
    }

    /// A batch with caller-chosen indices, used by enumeration oracles.
    pub fn from_indices(indices: Vec<usize>, mode: SamplingMode) -> Self {
        MiniBatch { indices, mode }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn validate_batch(n: usize, b: usize, mode: SamplingMode) -> Result<()> {
    if b == 0 {
        return Err(Error::Config("mini-batch size must be at least 1".into()));
    }
    if mode == SamplingMode::WithoutReplacement && b > n {
        return Err(Error::Config(format!("mini-batch size {b} exceeds n = {n} under sampling without replacement")));
    }
    Ok(())
}

pub fn draw_minibatch(rng: &mut Rng, n: usize, b: usize, mode: SamplingMode) -> Result<MiniBatch> {
    validate_batch(n, b, mode)?;
    let indices = match mode {
        SamplingMode::WithReplacement => (0..b).map(|_| rng.below(n)).collect(),
        SamplingMode::WithoutReplacement => rand::seq::index::sample(rng.inner_mut(), n, b).into_vec(),
    };
    Ok(MiniBatch { indices, mode })
}

/// `δ_n`: 1 for i.i.d. batches or partial batches, 0 for the full batch
/// drawn without replacement.
pub fn delta_n(mode: SamplingMode, b: usize, n: usize) -> u8 {
    match mode {
        SamplingMode::WithReplacement => 1,
        SamplingMode::WithoutReplacement => u8::from(b < n),
    }
}
