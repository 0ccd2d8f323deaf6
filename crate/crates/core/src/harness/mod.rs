//! Sweep orchestration, scaling-law fits and CSV/JSON output.

mod experiment;
mod fit;
mod grid;
mod output;

pub use experiment::{
    mean_model_a0, run_experiment, Check, ExperimentKind, ExperimentParams, FailureRecord, LossGrid, SweepConfig,
    SweepResult,
};
pub use fit::{fit_power_law, ratio_stability, restrict_below, LogLogFit, RatioStability, ScalingFit, MIN_R_SQUARED};
pub use grid::GridSpec;
pub use output::{artifact_version, config_hash, plot_script, sibling, SCHEMA_VERSION};
