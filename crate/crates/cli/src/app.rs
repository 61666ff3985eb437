//! Argument parsing and exit-status mapping for the `zo-kit` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigBuilder;
use crate::error::{CliError, Result};
use crate::runner::run_experiment;
use crate::table::emit_table1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ALL_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "zo-kit",
    version,
    about = "Zeroth-order SVRG experiment runner",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run several configurations and print the query/rate comparison table.
    Table1 {
        /// Directory receiving one subdirectory per configuration and table1.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Experiment configuration files, one table row each.
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// zo-sgd, zo-svrg, zo-svrg-ave, zo-svrg-coord, svrg or sgd.
    #[arg(long)]
    algo: Option<String>,
    /// Seeds, e.g. `1,2,3` or `0..10`.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Log every iteration or only epoch ends.
    #[arg(long, value_name = "iter|epoch")]
    trace_cadence: Option<String>,
    /// Built-in problem: synthetic, quadratic or attack-toy.
    #[arg(long)]
    preset: Option<String>,
    /// CSV dataset (label first, then features).
    #[arg(long)]
    data: Option<String>,
    /// Any other configuration key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn builder(args: &RunArgs) -> Result<ConfigBuilder> {
    let mut b = ConfigBuilder::new();
    if let Some(path) = &args.config {
        b.load_file(path).map_err(|e| match e {
            CliError::Io { path, source } => CliError::Config(format!("{}: {source}", path.display())),
            other => other,
        })?;
    }
    for kv in &args.set {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(CliError::Config(format!("--set: expected KEY=VALUE, got `{kv}`")));
        };
        b.set_from(k.trim(), v.trim(), crate::config::Origin::Flag("--set".into()))?;
    }
    let flags = [
        ("algo", &args.algo),
        ("seeds", &args.seed),
        ("out", &args.out),
        ("trace_cadence", &args.trace_cadence),
        ("preset", &args.preset),
        ("data", &args.data),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            let flag = if key == "seeds" { "--seed".to_string() } else { format!("--{}", key.replace('_', "-")) };
            b.set_from(key, v, crate::config::Origin::Flag(flag))?;
        }
    }
    Ok(b)
}

fn run(args: &RunArgs) -> Result<i32> {
    let cfg = builder(args)?.build()?;
    let result = run_experiment(&cfg)?;
    print!("{}", result.summary.to_text());
    Ok(if result.summary.all_diverged() { EXIT_ALL_DIVERGED } else { EXIT_OK })
}

fn table1(out: &std::path::Path, configs: &[PathBuf]) -> Result<i32> {
    let mut results = Vec::new();
    for path in configs {
        let mut b = ConfigBuilder::new();
        b.load_file(path)?;
        let mut cfg = b.build()?;
        let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        cfg.out_dir = out.join(&label);
        let result = match run_experiment(&cfg) {
            Ok(r) => Some(r),
            Err(e) if e.exit_code() == EXIT_CONFIG => return Err(e),
            Err(e) => {
                eprintln!("{label}: {e}");
                None
            }
        };
        results.push((label, result));
    }
    let runs: Vec<_> = results.iter().map(|(l, r)| (l.clone(), r.as_ref())).collect();
    let csv = emit_table1(&runs).to_csv();
    let path = out.join("table1.csv");
    std::fs::write(&path, &csv).map_err(|e| CliError::io(&path, e))?;
    print!("{csv}");
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs; returns the exit
/// status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Some(Command::Table1 { out, configs }) => table1(out, configs),
        None => run(&cli.run),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
