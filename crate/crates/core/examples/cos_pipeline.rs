//! The full damped-resolvent pipeline for T(u) = cos(u) on [-1, 1].
//!
//! Writes `cos_pipeline.csv` (and its plot data) to the system temp dir.

use fixpoint::scenario::{run_pipeline_command, ScenarioConfig};

fn main() -> fixpoint::Result<()> {
    let mut config = ScenarioConfig::default();
    config.set("operator", "cos(u)")?;
    config.set("grid-n", "64")?;
    config.out = Some(std::env::temp_dir().join("cos_pipeline.csv"));
    let artifacts = run_pipeline_command(&config)?;
    print!("{}", artifacts.summary);
    println!("csv written to {}", config.out.as_ref().unwrap().display());
    Ok(())
}
