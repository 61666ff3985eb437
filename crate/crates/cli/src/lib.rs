//! Command-line experiment runner: configuration, multi-seed execution,
//! trace files, summaries and the query/rate comparison table.

pub mod app;
pub mod config;
pub mod error;
pub mod problem;
pub mod runner;
pub mod table;
pub mod trace;

pub use config::{Algorithm, Cadence, ConfigBuilder, ExperimentConfig, ProblemSpec, Smoothing};
pub use error::{CliError, Result};
pub use runner::{run_experiment, ExperimentResult, SeedOutcome, Stat, Summary};
pub use table::{emit_table1, Table1, Table1Row};
pub use trace::{read_trace, write_trace, TraceRow};
pub use zokit_core as core;
