//! Scenario configuration, command implementations and run artifacts.

mod commands;
mod config;
mod example41;
pub mod output;

pub use commands::{
    run_certify_command, run_egoroff_command, run_pipeline, run_pipeline_command,
    run_solve_command, run_zolezzi_command, PipelineRun, RunArtifacts, Translation,
};
pub use config::{PinIndex, PinSpec, Scenario, ScenarioConfig, SEED_ENV};
pub use example41::{
    aitken_limit, run_example41, run_example41_command, Example41Config, Example41Outcome,
    JUMP_THRESHOLD,
};
