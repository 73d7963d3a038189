//! Command-line front end: flag parsing, config merging and exit codes.
//!
//! Exit codes: 0 success, 1 certification witness or failed run, 2 usage,
//! configuration or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::grid::GridKind;
use crate::scenario::{
    run_certify_command, run_egoroff_command, run_example41_command, run_pipeline_command,
    run_solve_command, run_zolezzi_command, Example41Config, RunArtifacts, ScenarioConfig,
};
use crate::solver::PathStatus;

#[derive(Debug, Parser)]
#[command(name = "fixpoint", version, about = "Damped-resolvent fixed points of pointwise nonexpansive operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample pairs from K and check |T(u)-T(v)| <= |u-v| at every atom
    Certify(Flags),
    /// Solve u = lambda T(u) once
    Solve(Flags),
    /// Run the damped path lambda_n -> 1 and write per-step CSV
    Pipeline(Flags),
    /// Reproduce the pinned-set counterexample T(u)(x) = x u(x)
    Example41(Flags),
    /// Egoroff exceptional set of the pipeline tail
    Egoroff(Flags),
    /// Pairing gaps versus Lp distances along the pipeline
    Zolezzi(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key=value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[arg(long, value_name = "N")]
    pub grid_n: Option<usize>,
    #[arg(long, value_name = "interior|node")]
    pub grid_kind: Option<String>,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub operator: Option<String>,
    #[arg(long, value_name = "EXPR|CONST", allow_hyphen_values = true)]
    pub lower: Option<String>,
    #[arg(long, value_name = "EXPR|CONST", allow_hyphen_values = true)]
    pub upper: Option<String>,
    /// idx=val, repeatable; idx may be `last`
    #[arg(long, value_name = "IDX=VAL")]
    pub pin: Vec<String>,
    #[arg(long, value_name = "geometric|harmonic|list:...")]
    pub schedule: Option<String>,
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,
    #[arg(long, value_name = "T")]
    pub inner_tol: Option<f64>,
    #[arg(long, value_name = "T")]
    pub pointwise_tol: Option<f64>,
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    /// defaults to $FIXPOINT_SEED, then 0
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "EPS")]
    pub epsilon: Option<f64>,
    #[arg(long, value_name = "L")]
    pub lambda: Option<f64>,
    #[arg(long, value_name = "N")]
    pub tail: Option<usize>,
    #[arg(long, value_name = "N")]
    pub picard_steps: Option<usize>,
}

impl Flags {
    /// Defaults, then `$FIXPOINT_SEED`, then the config file, then flags.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let mut c = ScenarioConfig::from_env()?;
        if let Some(path) = &self.config {
            c.apply_config_text(&std::fs::read_to_string(path)?)?;
        }
        let text = [
            ("domain", self.domain.clone()),
            ("grid-kind", self.grid_kind.clone()),
            ("operator", self.operator.clone()),
            ("lower", self.lower.clone()),
            ("upper", self.upper.clone()),
            ("schedule", self.schedule.clone()),
        ];
        for (k, v) in text {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        for p in &self.pin {
            c.set("pin", p)?;
        }
        if let Some(v) = self.grid_n {
            c.grid_n = v;
        }
        if let Some(v) = self.steps {
            c.steps = v;
        }
        if let Some(v) = self.inner_tol {
            c.inner_tol = v;
        }
        if let Some(v) = self.pointwise_tol {
            c.pointwise_tol = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.tail {
            c.tail = v;
        }
        if let Some(v) = self.picard_steps {
            c.picard_steps = v;
        }
        Ok(c)
    }
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_) | Error::Parse(_) | Error::Config { .. } | Error::Io(_)
    )
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if usage_error(&e) { 2 } else { 1 })
}

fn emit(artifacts: &RunArtifacts, config: &ScenarioConfig) {
    print!("{}", artifacts.summary);
    if config.out.is_none() {
        print!("{}", artifacts.csv);
    }
}

/// Runs one command and maps the outcome to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Certify(flags) => {
            let config = flags.resolve()?;
            let report = run_certify_command(&config)?;
            println!("{report}");
            Ok(ExitCode::from(if report.passed { 0 } else { 1 }))
        }
        Command::Solve(flags) => {
            let config = flags.resolve()?;
            let (result, summary) = run_solve_command(&config)?;
            print!("{summary}");
            Ok(ExitCode::from(if result.converged { 0 } else { 1 }))
        }
        Command::Pipeline(flags) => {
            let config = flags.resolve()?;
            let artifacts = run_pipeline_command(&config)?;
            emit(&artifacts, &config);
            Ok(ExitCode::from(if artifacts.status == PathStatus::FixedPointFound { 0 } else { 1 }))
        }
        Command::Example41(flags) => {
            let config = flags.resolve()?;
            let e = Example41Config {
                grid_n: config.grid_n,
                grid_kind: config.grid_kind.unwrap_or(GridKind::Node),
                picard_steps: config.picard_steps,
                samples: config.samples,
                seed: config.seed,
                epsilon: config.epsilon,
            };
            let outcome = run_example41_command(&e, config.out.as_deref())?;
            emit(&outcome.artifacts, &config);
            Ok(ExitCode::SUCCESS)
        }
        Command::Egoroff(flags) => {
            let config = flags.resolve()?;
            let (_, artifacts) = run_egoroff_command(&config)?;
            emit(&artifacts, &config);
            Ok(ExitCode::SUCCESS)
        }
        Command::Zolezzi(flags) => {
            let config = flags.resolve()?;
            let (_, artifacts) = run_zolezzi_command(&config)?;
            emit(&artifacts, &config);
            Ok(ExitCode::SUCCESS)
        }
    }
}
