//! Experiment runner: configs, seeded runs, invariant monitoring, CSV traces,
//! SVG panels, the environment x algorithm grid and the self-check suite.

pub mod config;
pub mod csv;
pub mod grid;
pub mod monitor;
pub mod rng;
pub mod runner;
pub mod svg;
pub mod verify;

pub use config::{AlgorithmKind, ExperimentConfig};
pub use grid::{grid_configs, grid_configs_from, run_grid, run_grid_configs, run_many, thread_count, write_run_outputs, GridReport};
pub use monitor::{Breach, InvariantMonitor};
pub use runner::{run_experiment, RoundRecord, RunOutput, RunSummary, Trace};
pub use svg::PlotMetric;
pub use verify::{run_verify, CheckOutcome};
