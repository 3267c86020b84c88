//! Experiment runner: configuration, β sweeps, persistence and plot data.

mod config;
pub mod journal;
mod runner;
mod verify;

pub use config::{AnsatzBlock, ExperimentConfig, MeasurementBlock, ModelBlock, ModelChoice, ObjectiveBlock, OptimizerBlock, OracleBlock};
pub use runner::{
    beta_key, emit_plotdata, run_measure, run_oracle, run_prepare, MeasureRecord, NoisyRecord, OracleRecord, RunSummary,
    Setup, MAX_BOUND_SITES, MAX_INFIDELITY_SITES, MEASURE_FILE, ORACLE_FILE, PREP_FILE, RECORD_SCHEMA_VERSION,
};
pub use verify::{run_verify, Check, VerifyReport};
