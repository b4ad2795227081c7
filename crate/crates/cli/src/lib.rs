//! Experiment runner for the `slowpass` toolkit.
//!
//! An experiment ([`ExperimentSpec`]) names a model, a grid, a ramp and a list of
//! analyses; [`run_experiment`] executes it (and any sweep it declares) and writes one
//! directory per run, a shared `analyses/` directory and a `manifest.json`.

pub mod analyze;
mod artifacts;
mod cgl;
pub mod config;
mod error;
mod lactotroph;
pub mod presets;
pub mod runner;
mod series;

pub use config::{Analysis, ExperimentSpec, ModelSpec};
pub use error::CliError;
pub use lactotroph::QssTable;
pub use presets::{preset, preset_catalog, Preset};
pub use runner::{load_config, run_experiment, Manifest, RunOptions, RunRecord, RunStatus};
pub use series::{burst_analyses, SeriesCollector};
pub use artifacts::RunState;
