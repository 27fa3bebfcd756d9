//! Experiment harness, labelers and HTTP labeling service on top of `active-core`.
//!
//! * [`harness`] runs simulated (strategy, trial) experiments and produces
//!   learning curves.
//! * [`output`] renders runs as CSV and JSON and writes them atomically.
//! * [`terminal`] asks a human for labels on the command line.
//! * [`service`] exposes live labeling sessions over HTTP.
//! * [`cli`] ties them together as the `active-lab` binary.

pub mod catalog;
pub mod cli;
pub mod harness;
pub mod output;
pub mod service;
pub mod spec;
pub mod terminal;

pub use catalog::{DatasetEntry, DisplayHint};
pub use harness::{run_experiment, run_trial, ExperimentConfig, HarnessError, LearningCurve, RunResults};
pub use spec::{ModelKind, StrategySpec};
