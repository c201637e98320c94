//! Configuration, orchestration and persistence of experiments.
//!
//! A JSON [`ExperimentConfig`] selects one experiment kind. [`run_experiment`]
//! dispatches to the speed formulas, the reaction-diffusion solver or the HJ
//! solver, and writes `report.json` plus CSV and SVG artifacts to the output
//! directory.

mod config;
mod experiment;
mod plot;
mod record;
mod sweep;

pub use config::{
    load_config, parse_config, ExperimentConfig, ExperimentKind, GridSettings, HjSettings,
    LlwMode, LlwSettings, ProfileSettings, SweepAxis, SweepSettings, Tolerances, SWEEP_PARAMS,
};
pub use experiment::{rd_grid, run_experiment};
pub use plot::{emit_plot, render_plot, PlotKind};
pub use record::{config_hash, Check, HjSummary, LlwSummary, RunRecord, SweepSummary};
pub use sweep::sweep_points;
