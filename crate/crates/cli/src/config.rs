//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Later settings override earlier ones, and command-line flags override
//! the file. Every error names where the offending value came from.
//!
//! | key              | values                                          | default   |
//! |------------------|-------------------------------------------------|-----------|
//! | `algo`           | `zo-sgd`, `zo-svrg`, `zo-svrg-ave`, `zo-svrg-coord`, `svrg`, `sgd` | required |
//! | `preset`         | `synthetic`, `quadratic`, `attack-toy`           | none      |
//! | `data`           | path to a CSV dataset (exclusive with `preset`)  | none      |
//! | `data_seed`      | seed used to generate preset data                | `0`       |
//! | `iterations`     | total iterations `T ≥ 1`                         | `1000`    |
//! | `epoch_len`      | epoch length `m ≥ 1`                             | `50`      |
//! | `eta`            | step size `≥ 0`                                  | `0.01`    |
//! | `batch`          | mini-batch size `b ≥ 1`                          | `10`      |
//! | `sampling`       | `with` or `without` replacement                  | `with`    |
//! | `mu`             | smoothing `> 0`, or `auto` for `1/√(dT)`          | `auto`    |
//! | `q`              | directions for `zo-svrg-ave`                     | `10`      |
//! | `estimator`      | estimator for `zo-sgd`: `rand`, `ave`, `coord`   | `rand`    |
//! | `output`         | `uniform` (random iterate) or `last`             | `uniform` |
//! | `x0`             | comma-separated start point                      | preset    |
//! | `seeds`          | comma list and/or `a..b` ranges (exclusive)      | `0`       |
//! | `out`            | output directory                                 | `out`     |
//! | `trace_cadence`  | `epoch` or `iter`                                | `epoch`   |
//! | `record_grad`    | `true`/`false`: log `‖∇f‖²` when available       | `true`    |

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use zokit_core::{OutputRule, SamplingMode};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    ZoSgd,
    ZoSvrg,
    ZoSvrgAve,
    ZoSvrgCoord,
    Svrg,
    Sgd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::ZoSgd,
        Algorithm::ZoSvrg,
        Algorithm::ZoSvrgAve,
        Algorithm::ZoSvrgCoord,
        Algorithm::Svrg,
        Algorithm::Sgd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ZoSgd => "zo-sgd",
            Algorithm::ZoSvrg => "zo-svrg",
            Algorithm::ZoSvrgAve => "zo-svrg-ave",
            Algorithm::ZoSvrgCoord => "zo-svrg-coord",
            Algorithm::Svrg => "svrg",
            Algorithm::Sgd => "sgd",
        }
    }

    pub fn is_first_order(self) -> bool {
        matches!(self, Algorithm::Svrg | Algorithm::Sgd)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    Rand,
    Ave,
    Coord,
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rand" => Ok(EstimatorKind::Rand),
            "ave" | "avg" => Ok(EstimatorKind::Ave),
            "coord" => Ok(EstimatorKind::Coord),
            _ => Err(format!("unknown estimator `{s}` (expected rand, ave or coord)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cadence {
    Iteration,
    Epoch,
}

impl FromStr for Cadence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iter" => Ok(Cadence::Iteration),
            "epoch" => Ok(Cadence::Epoch),
            _ => Err(format!("unknown trace cadence `{s}` (expected iter or epoch)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothing {
    /// `μ = 1/√(dT)`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Preset { name: String, data_seed: u64 },
    Dataset { path: PathBuf },
}

pub const PRESETS: [&str; 3] = ["synthetic", "quadratic", "attack-toy"];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub epoch_len: usize,
    pub eta: f64,
    pub batch_size: usize,
    pub sampling: SamplingMode,
    pub mu: Smoothing,
    pub q: usize,
    pub zo_sgd_estimator: EstimatorKind,
    pub output_rule: OutputRule,
    pub x0: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub cadence: Cadence,
    pub record_grad_norm: bool,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemSpec, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            problem,
            algorithm,
            iterations: 1000,
            epoch_len: 50,
            eta: 0.01,
            batch_size: 10,
            sampling: SamplingMode::WithReplacement,
            mu: Smoothing::Auto,
            q: 10,
            zo_sgd_estimator: EstimatorKind::Rand,
            output_rule: OutputRule::UniformRandomIterate,
            x0: None,
            seeds: vec![0],
            out_dir: PathBuf::from("out"),
            cadence: Cadence::Epoch,
            record_grad_norm: true,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut b = ConfigBuilder::new();
        b.load_file(path)?;
        b.build()
    }
}

/// Where a setting came from, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    File { path: String, line: usize },
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Flag(flag) => f.write_str(flag),
        }
    }
}

const KEYS: [&str; 18] = [
    "algo",
    "preset",
    "data",
    "data_seed",
    "iterations",
    "epoch_len",
    "eta",
    "batch",
    "sampling",
    "mu",
    "q",
    "estimator",
    "output",
    "x0",
    "seeds",
    "out",
    "trace_cadence",
    "record_grad",
];

/// Accumulates settings from files and flags (last wins), then validates.
#[derive(Clone, Debug, Default)]
pub struct ConfigBuilder {
    entries: BTreeMap<String, (String, Origin)>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load_file(&mut self, path: &Path) -> Result<&mut Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.parse_str(&text, &path.display().to_string())
    }

    /// Parses `key = value` lines; `label` names the source in errors.
    pub fn parse_str(&mut self, text: &str, label: &str) -> Result<&mut Self> {
        for (idx, raw) in text.lines().enumerate() {
            let origin = Origin::File { path: label.to_string(), line: idx + 1 };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("{origin}: expected `key = value`, found `{line}`")));
            };
            self.set_from(key.trim(), value.trim(), origin)?;
        }
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<&mut Self> {
        self.set_from(key, value, Origin::Flag(format!("--{}", key.replace('_', "-"))))
    }

    pub fn set_from(&mut self, key: &str, value: &str, origin: Origin) -> Result<&mut Self> {
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("{origin}: unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), (value.to_string(), origin));
        Ok(self)
    }

    fn get<T>(&self, key: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, origin)) => parse(v).map(Some).map_err(|e| CliError::Config(format!("{origin}: {key}: {e}"))),
        }
    }

    fn origin(&self, key: &str) -> String {
        self.entries.get(key).map_or_else(|| "config".to_string(), |(_, o)| o.to_string())
    }

    fn fail(&self, key: &str, msg: impl fmt::Display) -> CliError {
        CliError::Config(format!("{}: {msg}", self.origin(key)))
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let algorithm = self
            .get("algo", |v| v.parse::<Algorithm>())?
            .ok_or_else(|| CliError::Config("config: missing required key `algo`".into()))?;
        let data_seed = self.get("data_seed", parse_num::<u64>)?.unwrap_or(0);
        let problem = match (self.get("preset", |v| Ok(v.to_string()))?, self.get("data", |v| Ok(PathBuf::from(v)))?) {
            (Some(_), Some(_)) => return Err(self.fail("data", "`preset` and `data` are mutually exclusive")),
            (None, None) => return Err(CliError::Config("config: one of `preset` or `data` is required".into())),
            (Some(name), None) => {
                if !PRESETS.contains(&name.as_str()) {
                    return Err(
                        self.fail("preset", format!("unknown preset `{name}` (expected {})", PRESETS.join(", ")))
                    );
                }
                ProblemSpec::Preset { name, data_seed }
            }
            (None, Some(path)) => ProblemSpec::Dataset { path },
        };
        let mut cfg = ExperimentConfig::new(problem, algorithm);
        if let Some(t) = self.get("iterations", parse_num::<usize>)? {
            if t == 0 {
                return Err(self.fail("iterations", "iterations must be at least 1"));
            }
            cfg.iterations = t;
        }
        if let Some(m) = self.get("epoch_len", parse_num::<usize>)? {
            if m == 0 {
                return Err(self.fail("epoch_len", "epoch_len must be at least 1"));
            }
            cfg.epoch_len = m;
        }
        if let Some(eta) = self.get("eta", parse_num::<f64>)? {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(self.fail("eta", "eta must be finite and nonnegative"));
            }
            cfg.eta = eta;
        }
        if let Some(b) = self.get("batch", parse_num::<usize>)? {
            if b == 0 {
                return Err(self.fail("batch", "batch must be at least 1"));
            }
            cfg.batch_size = b;
        }
        if let Some(mode) = self.get("sampling", |v| v.parse::<SamplingMode>().map_err(|e| e.to_string()))? {
            cfg.sampling = mode;
        }
        if let Some(mu) = self.get("mu", |v| {
            if v == "auto" {
                return Ok(Smoothing::Auto);
            }
            let mu = parse_num::<f64>(v)?;
            if mu.is_finite() && mu > 0.0 {
                Ok(Smoothing::Fixed(mu))
            } else {
                Err("mu must be positive or `auto`".into())
            }
        })? {
            cfg.mu = mu;
        }
        if let Some(q) = self.get("q", parse_num::<usize>)? {
            if q == 0 {
                return Err(self.fail("q", "q must be at least 1"));
            }
            cfg.q = q;
        }
        if let Some(e) = self.get("estimator", |v| v.parse::<EstimatorKind>())? {
            cfg.zo_sgd_estimator = e;
        }
        if let Some(rule) = self.get("output", |v| match v {
            "uniform" => Ok(OutputRule::UniformRandomIterate),
            "last" => Ok(OutputRule::LastIterate),
            _ => Err(format!("unknown output rule `{v}` (expected uniform or last)")),
        })? {
            cfg.output_rule = rule;
        }
        cfg.x0 = self.get("x0", |v| v.split(',').map(|s| parse_num::<f64>(s.trim())).collect())?;
        if let Some(seeds) = self.get("seeds", parse_seeds)? {
            cfg.seeds = seeds;
        }
        if let Some(out) = self.get("out", |v| Ok(PathBuf::from(v)))? {
            cfg.out_dir = out;
        }
        if let Some(c) = self.get("trace_cadence", |v| v.parse::<Cadence>())? {
            cfg.cadence = c;
        }
        if let Some(r) = self.get("record_grad", |v| v.parse::<bool>().map_err(|e| e.to_string()))? {
            cfg.record_grad_norm = r;
        }
        Ok(cfg)
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("cannot parse `{v}`: {e}"))
}

/// `1,2,5..8` → `[1, 2, 5, 6, 7]`.
pub fn parse_seeds(v: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse_num::<u64>(a.trim())?, parse_num::<u64>(b.trim())?);
            if a >= b {
                return Err(format!("empty seed range `{part}`"));
            }
            seeds.extend(a..b);
        } else {
            seeds.push(parse_num::<u64>(part)?);
        }
    }
    if seeds.is_empty() {
        return Err("seed list is empty".into());
    }
    Ok(seeds)
}
