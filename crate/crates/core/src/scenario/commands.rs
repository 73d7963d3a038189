use std::fmt::Write as _;

use super::config::{Scenario, ScenarioConfig};
use super::output::{fmt_real, path_csv, path_plot, plot_columns, plot_path_for, write_atomic};
use crate::diagnostics::{
    dyadic_densities, egoroff_split, verify_residual_chain, zolezzi_check, EgoroffReport,
    ResidualChainReport, ZolezziReport,
};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridKind};
use crate::operators::{certify_strong_nonexpansive, translate_problem, CertificateReport};
use crate::solver::{
    approx_fixed_point_path, default_inner_max_iter, extract_pointwise_limit, resolvent,
    PathStatus, SolvePath, SolveResult,
};

/// Files and text produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub csv: String,
    pub summary: String,
    pub plot_data: Option<String>,
    pub status: PathStatus,
}

impl RunArtifacts {
    /// Writes the CSV to `out` and plot data beside it, when `out` is set.
    pub fn write(&self, config: &ScenarioConfig) -> Result<()> {
        if let Some(out) = &config.out {
            write_atomic(out, &self.csv)?;
            if let Some(plot) = &self.plot_data {
                write_atomic(&plot_path_for(out), plot)?;
            }
        }
        Ok(())
    }
}

/// Shift applied to make `0 in K`, if one was needed.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub constant: f64,
}

/// Everything computed by a pipeline run, in original (untranslated) coordinates.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub scenario: Scenario,
    pub certificate: CertificateReport,
    pub translation: Option<Translation>,
    pub path: SolvePath,
    pub limit: GridFunction,
    pub oscillation: f64,
    pub chain: ResidualChainReport,
}

pub fn run_certify_command(config: &ScenarioConfig) -> Result<CertificateReport> {
    let s = config.build(GridKind::Interior)?;
    certify_strong_nonexpansive(&s.op, &s.set, &s.grid, config.samples, config.seed)
}

fn certified(config: &ScenarioConfig, s: &Scenario) -> Result<CertificateReport> {
    let report = certify_strong_nonexpansive(&s.op, &s.set, &s.grid, config.samples, config.seed)?;
    if !report.passed {
        return Err(Error::NotNonexpansive(Box::new(report)));
    }
    Ok(report)
}

/// The constant shift making `0 in K`, or an explanation why none exists.
fn zero_translation(s: &Scenario) -> Result<Option<GridFunction>> {
    if s.set.contains_zero() {
        return Ok(None);
    }
    match s.set.constant_member() {
        Some(c) => Ok(Some(GridFunction::constant(&s.grid, c)?)),
        None => Err(Error::Precondition(no_translate_message(s))),
    }
}

fn no_translate_message(s: &Scenario) -> String {
    let pins: Vec<String> = s.set.pins().iter().map(|(i, v)| format!("u[{i}]={v}")).collect();
    format!(
        "0 is not in K and no constant translate of K contains 0 (pins: {}); the resolvent u = lambda T(u) is not a self-map problem",
        if pins.is_empty() { "none".into() } else { pins.join(", ") }
    )
}

fn shift_back(path: &mut SolvePath, v: &GridFunction) -> Result<()> {
    for step in &mut path.steps {
        step.solution = step.solution.add(v)?;
    }
    path.limit = path.limit.add(v)?;
    Ok(())
}

/// Certify, translate if needed, run the damped path, extract the limit and
/// evaluate the residual chain.
pub fn run_pipeline(config: &ScenarioConfig) -> Result<PipelineRun> {
    let scenario = config.build(GridKind::Interior)?;
    let certificate = certified(config, &scenario)?;
    let path_config = config.path_config()?;
    let shift = zero_translation(&scenario)?;
    let path = match &shift {
        None => approx_fixed_point_path(&scenario.op, &scenario.set, &scenario.grid, &path_config)?,
        Some(v) => {
            let (set, op) = translate_problem(&scenario.set, &scenario.op, v, &scenario.grid)?;
            let mut p = approx_fixed_point_path(&op, &set, &scenario.grid, &path_config)?;
            shift_back(&mut p, v)?;
            p
        }
    };
    if path.is_empty() {
        return Err(Error::Precondition(
            "the first resolvent step left K; T does not map K into itself".into(),
        ));
    }
    // u_N is the candidate; the tail mean lags it by O(1 - lambda_{N-tail})
    let (_, oscillation) = extract_pointwise_limit(&path, config.tail.clamp(1, path.len()))?;
    let limit = path.limit.clone();
    let chain = verify_residual_chain(&scenario.op, &path, &limit, &scenario.grid, config.epsilon)?;
    Ok(PipelineRun {
        translation: shift.map(|v| Translation { constant: v[0] }),
        scenario,
        certificate,
        path,
        limit,
        oscillation,
        chain,
    })
}

fn pipeline_summary(run: &PipelineRun) -> String {
    let mut s = String::new();
    let w = &mut s;
    let g = &run.scenario.grid;
    let _ = writeln!(w, "operator: T(u)(x) = {}", run.scenario.ast);
    let _ = writeln!(w, "grid: {} {} atoms on [{}, {}]", g.kind(), g.len(), g.hull().0, g.hull().1);
    let _ = writeln!(w, "certificate: {}", run.certificate);
    match &run.translation {
        Some(t) => {
            let _ = writeln!(w, "translation: solved in K - {} (0 not in K)", t.constant);
        }
        None => {
            let _ = writeln!(w, "translation: none (0 in K)");
        }
    }
    let _ = writeln!(w, "steps: {}", run.path.len());
    if let Some(last) = run.path.steps.last() {
        let _ = writeln!(w, "final lambda: {}", fmt_real(last.lambda));
        let _ = writeln!(w, "final residual_sup: {}", fmt_real(last.residual_sup));
        let _ = writeln!(w, "final residual_l1: {}", fmt_real(last.residual_l1));
    }
    let _ = writeln!(w, "tail oscillation: {}", fmt_real(run.oscillation));
    let (lo, hi) = run
        .limit
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let _ = writeln!(w, "limit range: [{}, {}]", fmt_real(lo), fmt_real(hi));
    let c = &run.chain;
    let _ = writeln!(
        w,
        "residual chain (eps {}): total {} <= c {} * eps + complement {}: {}",
        c.epsilon,
        fmt_real(c.total),
        fmt_real(c.c_bound),
        fmt_real(c.complement_term),
        if c.chain_satisfied { "satisfied" } else { "NOT satisfied" }
    );
    let _ = writeln!(w, "status: {}", run.path.status);
    s
}

pub fn run_pipeline_command(config: &ScenarioConfig) -> Result<RunArtifacts> {
    let run = run_pipeline(config)?;
    let artifacts = RunArtifacts {
        csv: path_csv(&run.path),
        summary: pipeline_summary(&run),
        plot_data: Some(path_plot(&run.scenario.grid, &run.path, &run.limit)),
        status: run.path.status,
    };
    artifacts.write(config)?;
    Ok(artifacts)
}

/// A single resolvent solve at `config.lambda`, from zero.
pub fn run_solve_command(config: &ScenarioConfig) -> Result<(SolveResult, String)> {
    let s = config.build(GridKind::Interior)?;
    let certificate = certified(config, &s)?;
    let shift = zero_translation(&s)?;
    let lambda = config.lambda;
    let max_iter = default_inner_max_iter(lambda, config.inner_tol);
    let zero = GridFunction::zeros(&s.grid);
    let mut result = match &shift {
        None => resolvent(&s.op, lambda, &s.set, &s.grid, &zero, config.inner_tol, max_iter)?,
        Some(v) => {
            let (set, op) = translate_problem(&s.set, &s.op, v, &s.grid)?;
            resolvent(&op, lambda, &set, &s.grid, &zero, config.inner_tol, max_iter)?
        }
    };
    if let Some(v) = &shift {
        result.solution = result.solution.add(v)?;
    }
    let mut summary = String::new();
    let _ = writeln!(summary, "operator: T(u)(x) = {}", s.ast);
    let _ = writeln!(summary, "certificate: {certificate}");
    let _ = writeln!(summary, "lambda: {lambda}");
    let _ = writeln!(summary, "iterations: {}", result.iterations);
    let _ = writeln!(summary, "a posteriori error: {}", fmt_real(result.a_posteriori_error));
    let _ = writeln!(summary, "converged: {}", result.converged);
    if let Some(out) = &config.out {
        write_atomic(out, &plot_columns(&s.grid, &[("u".into(), &result.solution)]))?;
    }
    Ok((result, summary))
}

/// Egoroff split of the pipeline tail against its extracted limit.
pub fn run_egoroff_command(config: &ScenarioConfig) -> Result<(EgoroffReport, RunArtifacts)> {
    let run = run_pipeline(config)?;
    let seq = run.path.iterates();
    let report = egoroff_split(&seq, &run.limit, &run.scenario.grid, config.epsilon, seq.len() / 2)?;
    let g = &run.scenario.grid;
    let mut csv = String::from("atom,x,weight,tail_deviation,exceptional\n");
    for i in 0..g.len() {
        let _ = writeln!(
            csv,
            "{i},{},{},{},{}",
            fmt_real(g.atoms()[i]),
            fmt_real(g.weights()[i]),
            fmt_real(report.tail_deviation[i]),
            u8::from(report.exceptional_atoms.binary_search(&i).is_ok())
        );
    }
    let mut summary = String::new();
    let _ = writeln!(summary, "epsilon: {}", config.epsilon);
    let _ = writeln!(summary, "tail start: {}", report.tail_start);
    let _ = writeln!(summary, "exceptional atoms: {:?}", report.exceptional_atoms);
    let _ = writeln!(summary, "exceptional measure: {}", fmt_real(report.exceptional_measure));
    let _ = writeln!(summary, "uniform tail deviation: {}", fmt_real(report.uniform_tail_deviation));
    let artifacts = RunArtifacts {
        csv,
        summary,
        plot_data: None,
        status: run.path.status,
    };
    artifacts.write(config)?;
    Ok((report, artifacts))
}

/// Pairing gaps and `L^1`, `L^2` distances of the pipeline iterates to the limit.
pub fn run_zolezzi_command(config: &ScenarioConfig) -> Result<(ZolezziReport, RunArtifacts)> {
    let run = run_pipeline(config)?;
    let g = &run.scenario.grid;
    let densities = dyadic_densities(g, 4);
    let report = zolezzi_check(&run.path.iterates(), &run.limit, g, &densities, &[1.0, 2.0])?;
    let mut csv = String::from("j,pairing_gap,l1,l2\n");
    for (j, (gap, d)) in report.pairing_gaps.iter().zip(&report.lp_distances).enumerate() {
        let _ = writeln!(csv, "{},{},{},{}", j + 1, fmt_real(*gap), fmt_real(d[0]), fmt_real(d[1]));
    }
    let summary = format!(
        "densities: {}\npairings vanish: {}\nL1 vanishes: {}\nL2 vanishes: {}\n{}\n",
        densities.len(),
        report.pairings_vanish(),
        report.distances_vanish(0),
        report.distances_vanish(1),
        if report.consistent {
            "consistent with weak-to-Lp convergence"
        } else {
            "NOT consistent: pairings vanish while an Lp distance does not"
        }
    );
    let artifacts = RunArtifacts {
        csv,
        summary,
        plot_data: None,
        status: run.path.status,
    };
    artifacts.write(config)?;
    Ok((report, artifacts))
}
