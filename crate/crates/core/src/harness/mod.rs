//! Experiment configuration and drivers.

mod config;
mod experiment;

pub use config::{load_config, parse_config, ExperimentConfig, Settings};
pub use experiment::{run_experiment, run_single, sweep_l, ExperimentReport, SweepRow, SIGNIFICANCE};
