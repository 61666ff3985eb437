use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::objective::FiniteSum;
use crate::rng::{Rng, Role};

/// Uniform sample of points in the box `center ± half_width` used to
/// estimate a gradient-variance bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceGrid {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub points: usize,
    pub seed: u64,
}

impl ReferenceGrid {
    pub fn sample(&self) -> Vec<Vec<f64>> {
        let mut rng = Rng::for_stream(self.seed, 0, 0, Role::Aux);
        (0..self.points)
            .map(|_| self.center.iter().map(|c| c + self.half_width * (2.0 * rng.uniform() - 1.0)).collect())
            .collect()
    }
}

/// `f_i(x) = ½ (x − c_i)ᵀ A_i (x − c_i)` with symmetric PSD `A_i`.
#[derive(Clone, Debug)]
pub struct QuadraticSumProblem {
    mats: Vec<DMatrix<f64>>,
    centers: Vec<DVector<f64>>,
    d: usize,
    l: f64,
    sigma_sq: Option<f64>,
}

impl QuadraticSumProblem {
    /// `mats[i]` is `A_i` in row-major order.
    pub fn new(mats: Vec<Vec<f64>>, centers: Vec<Vec<f64>>) -> Result<Self> {
        if mats.is_empty() || mats.len() != centers.len() {
            return Err(Error::Input("need one center per matrix and at least one component".into()));
        }
        let d = centers[0].len();
        if d == 0 {
            return Err(Error::Dimension("centers must be nonempty".into()));
        }
        let mut built = Vec::with_capacity(mats.len());
        let mut l: f64 = 0.0;
        for (i, (a, c)) in mats.iter().zip(&centers).enumerate() {
            if a.len() != d * d || c.len() != d {
                return Err(Error::Dimension(format!("component {i} does not match dimension {d}")));
            }
            let m = DMatrix::from_row_slice(d, d, a);
            let scale = m.amax().max(1.0);
            if (&m - m.transpose()).amax() > 1e-12 * scale {
                return Err(Error::Input(format!("A_{i} is not symmetric")));
            }
            let eig = SymmetricEigen::new(m.clone()).eigenvalues;
            if eig.min() < -1e-10 * scale {
                return Err(Error::Input(format!("A_{i} is not positive semidefinite")));
            }
            l = l.max(eig.max());
            built.push(m);
        }
        Ok(QuadraticSumProblem {
            mats: built,
            centers: centers.into_iter().map(DVector::from_vec).collect(),
            d,
            l,
            sigma_sq: None,
        })
    }

    /// Sets `σ² = 4·max ‖∇f_i(x)‖²` over the grid points and components.
    pub fn with_variance_bound(mut self, grid: &ReferenceGrid) -> Result<Self> {
        if grid.center.len() != self.d || grid.points == 0 {
            return Err(Error::Config("reference grid must match the problem dimension and be nonempty".into()));
        }
        let mut max_sq: f64 = 0.0;
        for x in grid.sample() {
            for i in 0..self.mats.len() {
                max_sq = max_sq.max(self.gradient(i, &x).norm_squared());
            }
        }
        self.sigma_sq = Some(4.0 * max_sq);
        Ok(self)
    }

    pub fn matrix(&self, i: usize) -> &DMatrix<f64> {
        &self.mats[i]
    }

    fn gradient(&self, i: usize, x: &[f64]) -> DVector<f64> {
        &self.mats[i] * (DVector::from_column_slice(x) - &self.centers[i])
    }

    /// `x* = (Σ A_i)⁻¹ Σ A_i c_i`.
    pub fn minimizer(&self) -> Result<Vec<f64>> {
        let mut sum_a = DMatrix::zeros(self.d, self.d);
        let mut rhs = DVector::zeros(self.d);
        for (a, c) in self.mats.iter().zip(&self.centers) {
            sum_a += a;
            rhs += a * c;
        }
        sum_a
            .lu()
            .solve(&rhs)
            .map(|v| v.as_slice().to_vec())
            .ok_or_else(|| Error::Input("sum of A_i is singular; minimizer is not unique".into()))
    }

    pub fn optimal_value(&self) -> Result<f64> {
        let x = self.minimizer()?;
        Ok((0..self.mats.len()).map(|i| self.eval_component(i, &x)).sum::<f64>() / self.mats.len() as f64)
    }
}

impl FiniteSum for QuadraticSumProblem {
    fn num_components(&self) -> usize {
        self.mats.len()
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn eval_component(&self, i: usize, x: &[f64]) -> f64 {
        let r = DVector::from_column_slice(x) - &self.centers[i];
        0.5 * r.dot(&(&self.mats[i] * &r))
    }

    fn provides_gradient(&self) -> bool {
        true
    }

    fn component_gradient(&self, i: usize, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.gradient(i, x).as_slice().to_vec())
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.l)
    }

    fn variance_bound(&self) -> Option<f64> {
        self.sigma_sq
    }
}

#[derive(Clone, Debug)]
pub struct QuadraticPreset {
    pub problem: QuadraticSumProblem,
    pub x0: Vec<f64>,
}

pub const QUADRATIC_N: usize = 20;
pub const QUADRATIC_D: usize = 5;

/// `A_i = B_i B_iᵀ/d + 0.1·I` with Gaussian `B_i`, Gaussian centers, start
/// at the all-ones vector, variance bound from 1000 points in `x0 ± 2`.
pub fn quadratic_preset(seed: u64) -> Result<QuadraticPreset> {
    let (n, d) = (QUADRATIC_N, QUADRATIC_D);
    let mut rng = Rng::for_stream(seed, 0, 0, Role::Data);
    let mut mats = Vec::with_capacity(n);
    let mut centers = Vec::with_capacity(n);
    for _ in 0..n {
        let b = DMatrix::from_fn(d, d, |_, _| rng.standard_normal());
        let a = &b * b.transpose() / d as f64 + DMatrix::identity(d, d) * 0.1;
        let a = (&a + a.transpose()) * 0.5;
        mats.push(a.transpose().as_slice().to_vec());
        centers.push((0..d).map(|_| rng.standard_normal()).collect());
    }
    let x0 = vec![1.0; d];
    let grid = ReferenceGrid { center: x0.clone(), half_width: 2.0, points: 1000, seed };
    let problem = QuadraticSumProblem::new(mats, centers)?.with_variance_bound(&grid)?;
    Ok(QuadraticPreset { problem, x0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> Vec<f64> {
        let d = values.len();
        let mut m = vec![0.0; d * d];
        for (i, v) in values.iter().enumerate() {
            m[i * d + i] = *v;
        }
        m
    }

    #[test]
    fn smoothness_is_largest_eigenvalue() {
        let p = QuadraticSumProblem::new(vec![diag(&[1.0, 3.0]), diag(&[2.0, 0.5])], vec![vec![0.0; 2]; 2]).unwrap();
        assert!((p.smoothness().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn minimizer_of_shared_matrix_is_mean_center() {
        let p = QuadraticSumProblem::new(vec![diag(&[2.0, 2.0]); 2], vec![vec![1.0, 0.0], vec![3.0, 2.0]]).unwrap();
        let x = p.minimizer().unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!((p.optimal_value().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        assert!(QuadraticSumProblem::new(vec![diag(&[1.0, -1.0])], vec![vec![0.0; 2]]).is_err());
        assert!(QuadraticSumProblem::new(vec![vec![1.0, 0.5, 0.0, 1.0]], vec![vec![0.0; 2]]).is_err());
    }

    #[test]
    fn gradient_is_a_times_offset() {
        let p = QuadraticSumProblem::new(vec![vec![2.0, 1.0, 1.0, 2.0]], vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(p.component_gradient(0, &[2.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        assert_eq!(p.eval_component(0, &[2.0, 1.0]), 3.0);
    }

    #[test]
    fn variance_bound_dominates_gradients_on_grid() {
        let preset = quadratic_preset(3).unwrap();
        let p = &preset.problem;
        let s2 = p.variance_bound().unwrap();
        let grid = ReferenceGrid { center: preset.x0.clone(), half_width: 2.0, points: 1000, seed: 3 };
        for x in grid.sample() {
            for i in 0..p.num_components() {
                let g = p.component_gradient(i, &x).unwrap();
                assert!(g.iter().map(|v| v * v).sum::<f64>() <= s2 / 4.0 + 1e-12);
            }
        }
    }
}
