//! Experiment harness: configuration files, single runs, seed sweeps and
//! method comparisons, with JSON and CSV reports.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;

pub use compare::{run_compare, CompareReport, CompareRow};
pub use config::{ModelSpec, Preset, RunConfig};
pub use error::{exit, HarnessError, Result};
pub use run::{execute, Model, SingleReport, SingleRun};
pub use sweep::{aggregate, run_sweep, AggregateStats, SeedRow, SweepReport};
