//! Two-point zeroth-order gradient estimators.
//!
//! | kind      | estimate of `∇f_i(x)`                                          | queries |
//! |-----------|----------------------------------------------------------------|---------|
//! | `Rand`    | `(d/μ) [f_i(x+μu) − f_i(x)] u`, `u` uniform on the sphere       | 2       |
//! | `AvgRand` | mean of `q` such terms, `f_i(x)` evaluated once                | q + 1   |
//! | `Coord`   | `Σ_ℓ [f_i(x+μ_ℓ e_ℓ) − f_i(x−μ_ℓ e_ℓ)] / (2μ_ℓ) e_ℓ`              | 2d      |
//!
//! `Rand` is computed by the same code path as `AvgRand` with `q = 1`, so
//! the two agree bitwise under a shared seed.

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::point::Point;
use crate::rng::Rng;
use crate::sampling::{sample_unit_ball, sample_unit_sphere, MiniBatch};

#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorSpec {
    Rand {
        mu: f64,
    },
    AvgRand {
        mu: f64,
        q: usize,
    },
    /// Per-coordinate smoothing `μ_ℓ`, one entry per dimension.
    Coord {
        mu: Vec<f64>,
    },
}

impl EstimatorSpec {
    pub fn coord_uniform(mu: f64, d: usize) -> Self {
        EstimatorSpec::Coord { mu: vec![mu; d] }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            EstimatorSpec::Rand { mu } | EstimatorSpec::AvgRand { mu, .. } if !positive(*mu) => {
                Err(Error::Config(format!("smoothing parameter must be positive, got {mu}")))
            }
            EstimatorSpec::AvgRand { q: 0, .. } => Err(Error::Config("direction count q must be at least 1".into())),
            EstimatorSpec::Coord { mu } if mu.len() != d => {
                Err(Error::Dimension(format!("coordinate smoothing has {} entries for dimension {d}", mu.len())))
            }
            EstimatorSpec::Coord { mu } if !mu.iter().all(|&m| positive(m)) => {
                Err(Error::Config("every coordinate smoothing parameter must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Function queries spent on one component estimate.
    pub fn queries_per_component(&self, d: usize) -> u64 {
        match self {
            EstimatorSpec::Rand { .. } => 2,
            EstimatorSpec::AvgRand { q, .. } => *q as u64 + 1,
            EstimatorSpec::Coord { .. } => 2 * d as u64,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::Rand { .. } => "rand",
            EstimatorSpec::AvgRand { .. } => "avg-rand",
            EstimatorSpec::Coord { .. } => "coord",
        }
    }

    /// Random directions consumed per component estimate; zero for `Coord`.
    fn direction_count(&self) -> usize {
        match self {
            EstimatorSpec::Rand { .. } => 1,
            EstimatorSpec::AvgRand { q, .. } => *q,
            EstimatorSpec::Coord { .. } => 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradientEstimate {
    pub vector: Point,
    pub queries_used: u64,
    /// Directions behind a random estimate, kept for variance diagnostics.
    pub directions: Option<Vec<Point>>,
}

pub(crate) fn draw_directions(spec: &EstimatorSpec, d: usize, rng: &mut Rng) -> Result<Vec<Point>> {
    (0..spec.direction_count()).map(|_| sample_unit_sphere(rng, d)).collect()
}

fn checked_query(obj: &Objective, i: usize, x: &[f64]) -> Result<f64> {
    let v = obj.query(i, x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue { component: i, point: x.to_vec() })
    }
}

/// Component estimate for fixed directions; `dirs` is ignored for `Coord`.
pub(crate) fn estimate_with_directions(
    spec: &EstimatorSpec,
    obj: &Objective,
    i: usize,
    x: &[f64],
    dirs: &[Point],
) -> Result<(Vec<f64>, u64)> {
    let d = x.len();
    let mut out = vec![0.0; d];
    let mut probe = x.to_vec();
    match spec {
        EstimatorSpec::Rand { mu } | EstimatorSpec::AvgRand { mu, .. } => {
            let base = checked_query(obj, i, x)?;
            for u in dirs {
                probe.iter_mut().zip(x.iter().zip(u.iter())).for_each(|(p, (xi, ui))| *p = xi + mu * ui);
                let diff = checked_query(obj, i, &probe)? - base;
                out.iter_mut().zip(u.iter()).for_each(|(o, ui)| *o += diff * ui);
            }
            let scale = d as f64 / (mu * dirs.len() as f64);
            out.iter_mut().for_each(|o| *o *= scale);
            Ok((out, 1 + dirs.len() as u64))
        }
        EstimatorSpec::Coord { mu } => {
            for l in 0..d {
                probe[l] = x[l] + mu[l];
                let plus = checked_query(obj, i, &probe)?;
                probe[l] = x[l] - mu[l];
                let minus = checked_query(obj, i, &probe)?;
                probe[l] = x[l];
                out[l] = (plus - minus) / (2.0 * mu[l]);
            }
            Ok((out, 2 * d as u64))
        }
    }
}

pub fn estimate_component(
    spec: &EstimatorSpec,
    obj: &Objective,
    i: usize,
    x: &Point,
    rng: &mut Rng,
) -> Result<GradientEstimate> {
    check_inputs(spec, obj, x)?;
    if i >= obj.n() {
        return Err(Error::Input(format!("component index {i} out of range for n = {}", obj.n())));
    }
    let dirs = draw_directions(spec, obj.dim(), rng)?;
    let (v, queries_used) = estimate_with_directions(spec, obj, i, x, &dirs)?;
    Ok(GradientEstimate { vector: Point::from_raw(v), queries_used, directions: (!dirs.is_empty()).then_some(dirs) })
}

/// Mini-batch estimate `(1/b) Σ_{i∈I} ∇̂f_i(x)` with independent directions
/// per component.
pub fn estimate_batch(
    spec: &EstimatorSpec,
    obj: &Objective,
    batch: &MiniBatch,
    x: &Point,
    rng: &mut Rng,
) -> Result<GradientEstimate> {
    check_inputs(spec, obj, x)?;
    if batch.is_empty() {
        return Err(Error::Config("mini-batch is empty".into()));
    }
    let mut acc = vec![0.0; obj.dim()];
    let mut queries = 0;
    for &i in batch.indices() {
        let dirs = draw_directions(spec, obj.dim(), rng)?;
        let (v, q) = estimate_with_directions(spec, obj, i, x, &dirs)?;
        acc.iter_mut().zip(&v).for_each(|(a, vi)| *a += vi);
        queries += q;
    }
    let b = batch.len() as f64;
    acc.iter_mut().for_each(|a| *a /= b);
    Ok(GradientEstimate { vector: Point::from_raw(acc), queries_used: queries, directions: None })
}

/// Mini-batch estimates at two points sharing each component's directions.
/// Returns `(∇̂f_I(x_a), ∇̂f_I(x_b), queries)`.
pub(crate) fn estimate_batch_pair(
    spec: &EstimatorSpec,
    obj: &Objective,
    batch: &MiniBatch,
    x_a: &[f64],
    x_b: &[f64],
    rng: &mut Rng,
) -> Result<(Vec<f64>, Vec<f64>, u64)> {
    let d = obj.dim();
    let mut acc_a = vec![0.0; d];
    let mut acc_b = vec![0.0; d];
    let mut queries = 0;
    for &i in batch.indices() {
        let dirs = draw_directions(spec, d, rng)?;
        let (va, qa) = estimate_with_directions(spec, obj, i, x_a, &dirs)?;
        let (vb, qb) = estimate_with_directions(spec, obj, i, x_b, &dirs)?;
        acc_a.iter_mut().zip(&va).for_each(|(a, v)| *a += v);
        acc_b.iter_mut().zip(&vb).for_each(|(a, v)| *a += v);
        queries += qa + qb;
    }
    let b = batch.len() as f64;
    acc_a.iter_mut().for_each(|a| *a /= b);
    acc_b.iter_mut().for_each(|a| *a /= b);
    Ok((acc_a, acc_b, queries))
}

fn check_inputs(spec: &EstimatorSpec, obj: &Objective, x: &Point) -> Result<()> {
    if x.dim() != obj.dim() {
        return Err(Error::Dimension(format!("point has dimension {}, objective {}", x.dim(), obj.dim())));
    }
    if !x.is_finite() {
        return Err(Error::Input("estimate requested at a non-finite point".into()));
    }
    spec.validate(obj.dim())
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte-Carlo value of the ball-smoothed component
/// `f_μ(x) = E_{v ~ U(ball)}[f_i(x + μv)]`.
pub fn smoothed_value_mc(
    obj: &Objective,
    i: usize,
    x: &Point,
    mu: f64,
    samples: usize,
    rng: &mut Rng,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let d = x.dim();
    let mut probe = x.to_vec();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let v = sample_unit_ball(rng, d)?;
        probe.iter_mut().zip(x.iter().zip(v.iter())).for_each(|(p, (xi, vi))| *p = xi + mu * vi);
        let f = checked_query(obj, i, &probe)?;
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(McEstimate { mean, std_error: (var / n).sqrt() })
}

/// Envelope on `E‖∇̂f(x) − ∇f(x)‖²` with explicit constants:
///
/// * `Rand`: `4d‖∇f‖² + (3/2) μ²L²d²`
/// * `AvgRand`: `4(1 + d/q)‖∇f‖² + (3 + 2/q) μ²L²d²/2`
/// * `Coord`: `(L²d/4) Σ μ_ℓ²` (deterministic, gradient-free)
pub fn estimator_error_bound(spec: &EstimatorSpec, l: f64, d: usize, grad_norm_sq: f64) -> f64 {
    let d = d as f64;
    match spec {
        EstimatorSpec::Rand { mu } => 4.0 * d * grad_norm_sq + 1.5 * mu * mu * l * l * d * d,
        EstimatorSpec::AvgRand { mu, q } => {
            let q = *q as f64;
            4.0 * (1.0 + d / q) * grad_norm_sq + (3.0 + 2.0 / q) * mu * mu * l * l * d * d / 2.0
        }
        EstimatorSpec::Coord { mu } => l * l * d / 4.0 * mu.iter().map(|m| m * m).sum::<f64>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::test_support::ScaledBowl;
    use crate::objective::FiniteSum;
    use crate::sampling::SamplingMode;

    fn half_norm_sq() -> Objective {
        Objective::from_problem(ScaledBowl { scales: vec![1.0], centers: vec![vec![0.0, 0.0]] })
    }

    struct Linear(Vec<f64>);
    impl FiniteSum for Linear {
        fn num_components(&self) -> usize {
            1
        }
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn eval_component(&self, _i: usize, x: &[f64]) -> f64 {
            crate::point::dot(&self.0, x)
        }
    }

    struct Exploding;
    impl FiniteSum for Exploding {
        fn num_components(&self) -> usize {
            1
        }
        fn dim(&self) -> usize {
            2
        }
        fn eval_component(&self, _i: usize, x: &[f64]) -> f64 {
            if x[0] > 0.0 {
                f64::NAN
            } else {
                0.0
            }
        }
    }

    #[test]
    fn coord_is_exact_on_half_norm_squared() {
        let obj = half_norm_sq();
        let x = Point::new(vec![3.0, -1.0]).unwrap();
        for mu in [0.5, 0.25, 1.0] {
            let spec = EstimatorSpec::coord_uniform(mu, 2);
            let g = estimate_component(&spec, &obj, 0, &x, &mut Rng::seed_from(0)).unwrap();
            assert_eq!(g.vector.as_slice(), &[3.0, -1.0]);
            assert_eq!(g.queries_used, 4);
        }
    }

    #[test]
    fn coord_ignores_rng() {
        let obj = half_norm_sq();
        let x = Point::new(vec![0.3, 0.7]).unwrap();
        let spec = EstimatorSpec::coord_uniform(1e-3, 2);
        let a = estimate_component(&spec, &obj, 0, &x, &mut Rng::seed_from(1)).unwrap();
        let b = estimate_component(&spec, &obj, 0, &x, &mut Rng::seed_from(99)).unwrap();
        assert_eq!(a.vector, b.vector);
    }

    #[test]
    fn rand_on_linear_is_d_a_dot_u_times_u() {
        let a = vec![1.0, -2.0, 0.5];
        let obj = Objective::from_problem(Linear(a.clone()));
        let x = Point::new(vec![0.1, 0.2, 0.3]).unwrap();
        let spec = EstimatorSpec::Rand { mu: 0.5 };
        let g = estimate_component(&spec, &obj, 0, &x, &mut Rng::seed_from(3)).unwrap();
        let u = &g.directions.as_ref().unwrap()[0];
        let au = crate::point::dot(&a, u);
        for l in 0..3 {
            assert!((g.vector[l] - 3.0 * au * u[l]).abs() < 1e-12);
        }
    }

    #[test]
    fn avg_rand_with_one_direction_equals_rand() {
        let obj = Objective::from_problem(ScaledBowl { scales: vec![2.0], centers: vec![vec![1.0, 2.0, -1.0]] });
        let x = Point::new(vec![0.4, -0.3, 0.9]).unwrap();
        let r = estimate_component(&EstimatorSpec::Rand { mu: 0.01 }, &obj, 0, &x, &mut Rng::seed_from(11)).unwrap();
        let a = estimate_component(&EstimatorSpec::AvgRand { mu: 0.01, q: 1 }, &obj, 0, &x, &mut Rng::seed_from(11))
            .unwrap();
        assert_eq!(r.vector, a.vector);
        assert_eq!(r.queries_used, a.queries_used);
    }

    #[test]
    fn query_costs_per_kind() {
        let obj = Objective::from_problem(ScaledBowl { scales: vec![1.0; 3], centers: vec![vec![0.0; 4]; 3] });
        let x = Point::new(vec![0.1; 4]).unwrap();
        let cases = [
            (EstimatorSpec::Rand { mu: 0.1 }, 2),
            (EstimatorSpec::AvgRand { mu: 0.1, q: 7 }, 8),
            (EstimatorSpec::coord_uniform(0.1, 4), 8),
        ];
        for (spec, expected) in cases {
            obj.reset_queries();
            let g = estimate_component(&spec, &obj, 1, &x, &mut Rng::seed_from(0)).unwrap();
            assert_eq!(g.queries_used, expected);
            assert_eq!(obj.queries(), expected);
        }
    }

    #[test]
    fn batch_of_ten_rand_costs_twenty() {
        let obj = Objective::from_problem(ScaledBowl { scales: vec![1.0; 10], centers: vec![vec![0.0; 3]; 10] });
        let x = Point::new(vec![1.0; 3]).unwrap();
        let batch = MiniBatch::full(10);
        let g = estimate_batch(&EstimatorSpec::Rand { mu: 0.1 }, &obj, &batch, &x, &mut Rng::seed_from(0)).unwrap();
        assert_eq!(g.queries_used, 20);
        assert_eq!(obj.queries(), 20);
    }

    #[test]
    fn singleton_batch_equals_component_estimate() {
        let obj = Objective::from_problem(ScaledBowl {
            scales: vec![1.0, 2.0, 3.0],
            centers: vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 2.0]],
        });
        let x = Point::new(vec![0.2, 0.1]).unwrap();
        let spec = EstimatorSpec::AvgRand { mu: 0.05, q: 3 };
        let single = estimate_component(&spec, &obj, 2, &x, &mut Rng::seed_from(5)).unwrap();
        let batch = MiniBatch::from_indices(vec![2], SamplingMode::WithoutReplacement);
        let b = estimate_batch(&spec, &obj, &batch, &x, &mut Rng::seed_from(5)).unwrap();
        assert_eq!(single.vector, b.vector);
    }

    #[test]
    fn full_batch_coord_recovers_full_gradient() {
        let bowl =
            ScaledBowl { scales: vec![1.0, 2.0, 4.0], centers: vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 2.0]] };
        let obj = Objective::from_problem(bowl);
        let x = Point::new(vec![0.5, -0.25]).unwrap();
        let g = estimate_batch(
            &EstimatorSpec::coord_uniform(0.5, 2),
            &obj,
            &MiniBatch::full(3),
            &x,
            &mut Rng::seed_from(0),
        )
        .unwrap();
        let truth = obj.full_gradient_uninstrumented(&x).unwrap();
        for (a, b) in g.vector.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn non_finite_values_carry_component_and_probe() {
        let obj = Objective::from_problem(Exploding);
        let x = Point::new(vec![0.0, 0.0]).unwrap();
        let err =
            estimate_component(&EstimatorSpec::coord_uniform(0.1, 2), &obj, 0, &x, &mut Rng::seed_from(0)).unwrap_err();
        match err {
            Error::NonFiniteValue { component, point } => {
                assert_eq!(component, 0);
                assert_eq!(point, vec![0.1, 0.0]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(EstimatorSpec::Rand { mu: 0.0 }.validate(2).is_err());
        assert!(EstimatorSpec::AvgRand { mu: 0.1, q: 0 }.validate(2).is_err());
        assert!(EstimatorSpec::coord_uniform(0.1, 3).validate(2).is_err());
        assert!(EstimatorSpec::Coord { mu: vec![0.1, -0.1] }.validate(2).is_err());
        assert!(EstimatorSpec::AvgRand { mu: 0.1, q: 4 }.validate(2).is_ok());
    }

    #[test]
    fn error_bound_examples() {
        let coord = EstimatorSpec::coord_uniform(0.1, 4);
        assert!((estimator_error_bound(&coord, 2.0, 4, 123.0) - 0.16).abs() < 1e-15);
        let mu = 0.2;
        let rand = EstimatorSpec::Rand { mu };
        let expected = 1.5 * mu * mu * 9.0 * 25.0;
        assert!((estimator_error_bound(&rand, 3.0, 5, 0.0) - expected).abs() < 1e-12);
    }
}
