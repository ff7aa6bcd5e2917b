//! Experiment driver: configuration, repeated runs, statistics and output.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{BarrierWindow, ExperimentConfig};
pub use experiment::{run_experiment, run_once, RunRecord, THREADS_ENV};
pub use report::{emit, summarize, CellStats, EfficiencyReport, MethodComparison, OutputFormat, SummaryRow};
