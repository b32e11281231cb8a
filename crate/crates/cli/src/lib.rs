//! Config-driven experiment runner for `lcalim-core`.

pub mod config;
pub mod runner;
pub mod selftest;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use runner::{run_experiment, run_file, Command, RunError, RunSummary};
