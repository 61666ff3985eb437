use std::sync::Arc;

use zokit_core::problems::{
    attack_toy_preset, distortion_l2, quadratic_preset, read_dataset, synthetic_preset, AttackProblem, NllsProblem,
};
use zokit_core::FiniteSum;

use crate::config::ProblemSpec;
use crate::error::{CliError, Result};

/// A constructed objective plus what is needed to report problem-specific
/// metrics at the output point.
#[derive(Clone)]
pub struct LoadedProblem {
    pub name: String,
    pub objective: Arc<dyn FiniteSum>,
    pub default_x0: Vec<f64>,
    extras: Extras,
}

#[derive(Clone)]
enum Extras {
    Nlls { train: NllsProblem, test: Option<NllsProblem> },
    Quadratic { optimal_value: f64 },
    Attack(AttackProblem),
}

impl LoadedProblem {
    pub fn load(spec: &ProblemSpec) -> Result<Self> {
        match spec {
            ProblemSpec::Preset { name, data_seed } => match name.as_str() {
                "synthetic" => {
                    let p = synthetic_preset(*data_seed)?;
                    let d = p.train.d();
                    Ok(LoadedProblem {
                        name: name.clone(),
                        objective: Arc::new(p.train.clone()),
                        default_x0: vec![0.0; d],
                        extras: Extras::Nlls { train: p.train, test: Some(p.test) },
                    })
                }
                "quadratic" => {
                    let p = quadratic_preset(*data_seed)?;
                    let optimal_value = p.problem.optimal_value()?;
                    Ok(LoadedProblem {
                        name: name.clone(),
                        objective: Arc::new(p.problem),
                        default_x0: p.x0,
                        extras: Extras::Quadratic { optimal_value },
                    })
                }
                "attack-toy" => {
                    let p = attack_toy_preset(*data_seed)?;
                    Ok(LoadedProblem {
                        name: name.clone(),
                        objective: Arc::new(p.clone()),
                        default_x0: vec![0.0; p.dim()],
                        extras: Extras::Attack(p),
                    })
                }
                other => Err(CliError::Config(format!("config: unknown preset `{other}`"))),
            },
            ProblemSpec::Dataset { path } => {
                let train = read_dataset(path).map_err(|e| match e {
                    zokit_core::Error::Io(source) => CliError::Config(format!("{}: {source}", path.display())),
                    other => CliError::Core(other),
                })?;
                Ok(LoadedProblem {
                    name: path.display().to_string(),
                    objective: Arc::new(train.clone()),
                    default_x0: vec![0.0; train.d()],
                    extras: Extras::Nlls { train, test: None },
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.objective.num_components()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Named scalar metrics of a candidate solution, in a fixed order.
    pub fn metrics(&self, x: &[f64]) -> Vec<(&'static str, f64)> {
        match &self.extras {
            Extras::Nlls { train, test } => {
                let mut m = vec![("train_error", train.error_rate(x))];
                if let Some(test) = test {
                    m.push(("test_error", test.error_rate(x)));
                }
                m
            }
            Extras::Quadratic { optimal_value } => {
                let f = (0..self.n()).map(|i| self.objective.eval_component(i, x)).sum::<f64>() / self.n() as f64;
                vec![("optimality_gap", f - optimal_value)]
            }
            Extras::Attack(p) => {
                let hits = (0..p.n()).filter(|&i| p.is_successful(i, x)).count();
                let mut m = vec![("success_rate", hits as f64 / p.n() as f64)];
                if let Some(dist) = distortion_l2(p, x, true) {
                    m.push(("distortion_l2", dist));
                }
                m
            }
        }
    }
}
