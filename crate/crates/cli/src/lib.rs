//! Scenario runner and self-check behind the `cdos` binary.

pub mod check;
pub mod config;
pub mod runner;

pub use config::{ConfigError, Format, Normalization, Scenario, ScenarioConfig, Sweep};
pub use runner::{
    config_hash, execute, run, run_with_workers, RunError, RunReport, RunRequest, Summary,
    SweepOutput,
};
