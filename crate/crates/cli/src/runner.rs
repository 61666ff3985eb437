use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use zokit_core::{
    run_sgd_first_order, run_svrg_first_order, run_zo_sgd, run_zo_svrg, EstimatorSpec, Objective, Point, RunConfig,
    RunTrace, StepSchedule,
};

use crate::config::{Algorithm, EstimatorKind, ExperimentConfig, Smoothing};
use crate::error::{CliError, Result};
use crate::problem::LoadedProblem;
use crate::trace::{select_rows, write_trace};

pub const THREADS_ENV: &str = "ZO_KIT_THREADS";
pub const SUMMARY_FILE: &str = "summary.txt";

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed{seed}.csv")
}

#[derive(Clone, Debug)]
pub struct SeedOutcome {
    pub seed: u64,
    pub diverged: bool,
    pub trace: RunTrace,
    pub trace_path: PathBuf,
    /// Loss, `‖∇f‖²` and problem metrics at the returned point; empty for
    /// diverged runs.
    pub output_metrics: Vec<(String, f64)>,
}

/// Mean and sample standard deviation (`n − 1` denominator, 0 for a single
/// value, NaN for none), accumulated in seed order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len();
        if n == 0 {
            return Stat { mean: f64::NAN, std: f64::NAN, count: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, std, count: n }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub problem: String,
    pub seeds: Vec<u64>,
    pub diverged_seeds: Vec<u64>,
    pub final_loss: Stat,
    pub final_grad_norm_sq: Option<Stat>,
    pub total_queries: Stat,
    pub output: Vec<(String, Stat)>,
}

impl Summary {
    pub fn all_diverged(&self) -> bool {
        self.diverged_seeds.len() == self.seeds.len()
    }

    /// One `key=value` per line. Statistics cover completed seeds only.
    pub fn to_text(&self) -> String {
        let join = |s: &[u64]| s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "algo={}", self.algorithm);
        let _ = writeln!(out, "problem={}", self.problem);
        let _ = writeln!(out, "seeds={}", join(&self.seeds));
        let _ = writeln!(out, "completed={}", self.seeds.len() - self.diverged_seeds.len());
        let _ = writeln!(out, "diverged={}", self.diverged_seeds.len());
        let _ = writeln!(out, "diverged_seeds={}", join(&self.diverged_seeds));
        let mut stat = |name: &str, s: &Stat| {
            let _ = writeln!(out, "{name}_mean={}", s.mean);
            let _ = writeln!(out, "{name}_std={}", s.std);
        };
        stat("final_loss", &self.final_loss);
        if let Some(g) = &self.final_grad_norm_sq {
            stat("final_grad_norm_sq", g);
        }
        stat("total_queries", &self.total_queries);
        for (name, s) in &self.output {
            stat(&format!("output_{name}"), s);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub n: usize,
    pub d: usize,
    pub outcomes: Vec<SeedOutcome>,
    pub summary: Summary,
}

/// The estimator an algorithm uses on a `d`-dimensional problem; `None` for
/// first-order methods.
pub fn estimator_for(cfg: &ExperimentConfig, d: usize) -> Option<EstimatorSpec> {
    let mu = match cfg.mu {
        Smoothing::Auto => 1.0 / ((d * cfg.iterations) as f64).sqrt(),
        Smoothing::Fixed(mu) => mu,
    };
    let kind = match cfg.algorithm {
        Algorithm::Svrg | Algorithm::Sgd => return None,
        Algorithm::ZoSvrg => EstimatorKind::Rand,
        Algorithm::ZoSvrgAve => EstimatorKind::Ave,
        Algorithm::ZoSvrgCoord => EstimatorKind::Coord,
        Algorithm::ZoSgd => cfg.zo_sgd_estimator,
    };
    Some(match kind {
        EstimatorKind::Rand => EstimatorSpec::Rand { mu },
        EstimatorKind::Ave => EstimatorSpec::AvgRand { mu, q: cfg.q },
        EstimatorKind::Coord => EstimatorSpec::coord_uniform(mu, d),
    })
}

fn run_config(cfg: &ExperimentConfig, problem: &LoadedProblem, seed: u64) -> Result<RunConfig> {
    let x0 = cfg.x0.clone().unwrap_or_else(|| problem.default_x0.clone());
    if x0.len() != problem.dim() {
        return Err(CliError::Config(format!(
            "config: x0 has {} entries, problem dimension is {}",
            x0.len(),
            problem.dim()
        )));
    }
    let x0 = Point::new(x0).map_err(|e| CliError::Config(format!("config: x0: {e}")))?;
    let estimator = estimator_for(cfg, problem.dim()).unwrap_or(EstimatorSpec::Rand { mu: 1.0 });
    let mut rc = RunConfig::new(x0, estimator);
    rc.iterations = cfg.iterations;
    rc.epoch_len = cfg.epoch_len;
    rc.step = StepSchedule::Constant(cfg.eta);
    rc.batch_size = cfg.batch_size;
    rc.sampling = cfg.sampling;
    rc.seed = seed;
    rc.output_rule = cfg.output_rule;
    rc.record_grad_norm = cfg.record_grad_norm;
    Ok(rc)
}

fn run_seed(cfg: &ExperimentConfig, problem: &LoadedProblem, seed: u64) -> Result<SeedOutcome> {
    let obj = Objective::new(problem.objective.clone());
    let rc = run_config(cfg, problem, seed)?;
    let result = match cfg.algorithm {
        Algorithm::ZoSgd => run_zo_sgd(&rc, &obj),
        Algorithm::ZoSvrg | Algorithm::ZoSvrgAve | Algorithm::ZoSvrgCoord => run_zo_svrg(&rc, &obj),
        Algorithm::Svrg => run_svrg_first_order(&rc, &obj),
        Algorithm::Sgd => run_sgd_first_order(&rc, &obj),
    };
    let (trace, diverged) = match result {
        Ok(t) => (t, false),
        Err(zokit_core::Error::Diverged { trace }) => (*trace, true),
        Err(e) => return Err(e.into()),
    };
    let trace_path = cfg.out_dir.join(trace_file_name(seed));
    write_trace(&trace_path, &select_rows(&trace.records, cfg.cadence))?;
    let mut output_metrics = Vec::new();
    if !diverged {
        let x = trace.output_point.as_slice();
        output_metrics.push(("loss".to_string(), obj.loss(x)));
        if let Some(g) = obj.grad_norm_sq(x) {
            output_metrics.push(("grad_norm_sq".to_string(), g));
        }
        output_metrics.extend(problem.metrics(x).into_iter().map(|(k, v)| (k.to_string(), v)));
    }
    Ok(SeedOutcome { seed, diverged, trace, trace_path, output_metrics })
}

/// Worker count: `ZO_KIT_THREADS` if set, else the available parallelism,
/// never more than the number of seeds.
pub fn worker_threads(seeds: usize) -> Result<usize> {
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(cap.min(seeds).max(1))
}

pub fn summarize(cfg: &ExperimentConfig, problem_name: &str, outcomes: &[SeedOutcome]) -> Summary {
    let done: Vec<&SeedOutcome> = outcomes.iter().filter(|o| !o.diverged).collect();
    let final_loss: Vec<f64> = done.iter().map(|o| o.trace.final_loss()).collect();
    let grads: Option<Vec<f64>> = done.iter().map(|o| o.trace.records.last().and_then(|r| r.grad_norm_sq)).collect();
    let queries: Vec<f64> = done.iter().map(|o| o.trace.total_queries() as f64).collect();
    let mut names: Vec<String> = Vec::new();
    for o in &done {
        for (k, _) in &o.output_metrics {
            if !names.contains(k) {
                names.push(k.clone());
            }
        }
    }
    let output = names
        .into_iter()
        .map(|name| {
            let vals: Vec<f64> = done
                .iter()
                .filter_map(|o| o.output_metrics.iter().find(|(k, _)| *k == name).map(|(_, v)| *v))
                .collect();
            (name, Stat::of(&vals))
        })
        .collect();
    Summary {
        algorithm: cfg.algorithm,
        problem: problem_name.to_string(),
        seeds: outcomes.iter().map(|o| o.seed).collect(),
        diverged_seeds: outcomes.iter().filter(|o| o.diverged).map(|o| o.seed).collect(),
        final_loss: Stat::of(&final_loss),
        final_grad_norm_sq: grads.filter(|g| !g.is_empty()).map(|g| Stat::of(&g)),
        total_queries: Stat::of(&queries),
        output,
    }
}

/// Runs every seed, writes `trace_seed<seed>.csv` per seed and
/// `summary.txt` into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.seeds.is_empty() {
        return Err(CliError::Config("config: seeds: seed list is empty".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = cfg.seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(CliError::Config(format!("config: seeds: seed {dup} listed twice")));
    }
    let problem = LoadedProblem::load(&cfg.problem)?;
    // Validate the shared part of the run configuration before spawning work.
    let probe = run_config(cfg, &problem, cfg.seeds[0])?;
    probe.validate(&Objective::new(problem.objective.clone()))?;

    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads(cfg.seeds.len())?)
        .build()
        .map_err(|e| CliError::io(&cfg.out_dir, std::io::Error::other(e)))?;
    let outcomes: Vec<SeedOutcome> =
        pool.install(|| cfg.seeds.par_iter().map(|&seed| run_seed(cfg, &problem, seed)).collect::<Result<Vec<_>>>())?;

    let summary = summarize(cfg, &problem.name, &outcomes);
    let path = cfg.out_dir.join(SUMMARY_FILE);
    std::fs::write(&path, summary.to_text()).map_err(|e| CliError::io(&path, e))?;
    Ok(ExperimentResult { config: cfg.clone(), n: problem.n(), d: problem.dim(), outcomes, summary })
}
