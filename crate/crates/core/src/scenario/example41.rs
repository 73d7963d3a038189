//! The pinned-set counterexample on `C[0,1]`.
//!
//! `K = {u : u(0) = 0, u(1) = 1, 0 <= u <= 1}` and `T(u)(x) = x u(x)`.
//! `T` is pointwise nonexpansive and maps `K` into itself, yet has no
//! continuous fixed point in `K`: Picard iterates `x^(k+1)` converge pointwise
//! to the indicator of `{1}`, whose discrete Lipschitz constant is `1/h` and
//! blows up under refinement. No constant translate of `K` contains zero.

use std::fmt::Write as _;

use super::commands::RunArtifacts;
use super::output::{fmt_real, path_csv, plot_columns, plot_path_for, write_atomic};
use crate::diagnostics::{verify_residual_chain, ResidualChainReport};
use crate::error::{invalid, Error, Result};
use crate::grid::{discrete_lipschitz, GridFunction, GridKind, MeasureGrid};
use crate::operators::{certify_strong_nonexpansive, BoxSet, CertificateReport, PointwiseOperator};
use crate::solver::{resolvent, PathStatus, SolvePath, StepRecord};

/// A limit jumping by at least this much across one cell is flagged as
/// escaping every equicontinuous family.
pub const JUMP_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Example41Config {
    pub grid_n: usize,
    pub grid_kind: GridKind,
    pub picard_steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub epsilon: f64,
}

impl Default for Example41Config {
    fn default() -> Self {
        Self {
            grid_n: 64,
            grid_kind: GridKind::Node,
            picard_steps: 200,
            samples: 1000,
            seed: 0,
            epsilon: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Example41Outcome {
    pub grid: MeasureGrid,
    pub set: BoxSet,
    pub certificate: CertificateReport,
    pub zero_in_set: bool,
    pub constant_translate: Option<f64>,
    /// Message from the resolvent's refusal to run.
    pub resolvent_refusal: String,
    /// Picard iterates `u_k = x^(k+1)`, `k = 1..=picard_steps`; each record's
    /// `residual_sup` is the successive gap `sup |u_{k+1} - u_k|`.
    pub path: SolvePath,
    pub limit: GridFunction,
    pub lipschitz: f64,
    /// Largest jump of the limit across one cell.
    pub max_jump: f64,
    pub equicontinuity_violated: bool,
    pub chain: ResidualChainReport,
    pub status: PathStatus,
    pub artifacts: RunArtifacts,
}

impl Example41Outcome {
    /// `sup |u_{k+1} - u_k|` for `k = 1..=picard_steps`.
    pub fn gaps(&self) -> Vec<f64> {
        self.path.steps.iter().map(|s| s.residual_sup).collect()
    }
}

/// Per-atom Aitken delta-squared extrapolation of the last three iterates.
/// Stationary atoms keep their value.
pub fn aitken_limit(a: &GridFunction, b: &GridFunction, c: &GridFunction) -> Result<GridFunction> {
    if a.len() != b.len() || b.len() != c.len() {
        return invalid("iterates differ in length");
    }
    GridFunction::new(
        (0..a.len())
            .map(|i| {
                let (x0, x1, x2) = (a[i], b[i], c[i]);
                let denom = x2 - 2.0 * x1 + x0;
                if denom == 0.0 {
                    x2
                } else {
                    x2 - (x2 - x1).powi(2) / denom
                }
            })
            .collect(),
    )
}

pub fn run_example41(config: &Example41Config) -> Result<Example41Outcome> {
    if config.grid_kind != GridKind::Node {
        return invalid("the pinned set needs endpoint atoms; use a node grid");
    }
    if config.picard_steps < 3 {
        return invalid("need at least 3 Picard steps to extrapolate a limit");
    }
    let grid = MeasureGrid::uniform(0.0, 1.0, config.grid_n, GridKind::Node)?;
    let last = grid.len() - 1;
    let set = BoxSet::interval(&grid, 0.0, 1.0)?.with_pins(vec![(0, 0.0), (last, 1.0)])?;
    let op = PointwiseOperator::parse("x*u")?;

    let certificate = certify_strong_nonexpansive(&op, &set, &grid, config.samples, config.seed)?;
    let zero_in_set = set.contains_zero();
    let constant_translate = set.constant_member();
    let start = GridFunction::from_fn(&grid, |x| x)?;
    let resolvent_refusal = match resolvent(&op, 0.5, &set, &grid, &start, 1e-10, 1000) {
        Err(Error::Precondition(msg)) => msg,
        Err(e) => return Err(e),
        Ok(_) => return invalid("resolvent unexpectedly accepted a set without zero"),
    };

    let mut steps = Vec::with_capacity(config.picard_steps);
    let mut u = op.apply(&start, &grid)?;
    for _ in 0..config.picard_steps {
        let next = op.apply(&u, &grid)?;
        steps.push(StepRecord::new(&op, &grid, 1.0, u, 1)?);
        u = next;
    }
    let n = steps.len();
    let limit = aitken_limit(&steps[n - 3].solution, &steps[n - 2].solution, &steps[n - 1].solution)?;
    let lipschitz = discrete_lipschitz(&limit, &grid)?;
    let max_jump = limit
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let equicontinuity_violated = max_jump >= JUMP_THRESHOLD;
    let status = if equicontinuity_violated || !set.contains(&limit) {
        PathStatus::NotInSet
    } else {
        PathStatus::FixedPointFound
    };
    let path = SolvePath {
        steps,
        limit: limit.clone(),
        status,
        failed_step: None,
    };
    let chain = verify_residual_chain(&op, &path, &limit, &grid, config.epsilon)?;

    let mut summary = String::new();
    let w = &mut summary;
    let _ = writeln!(w, "scenario: T(u)(x) = x*u on K = {{u(0)=0, u(1)=1, 0<=u<=1}}, node grid n={}", grid.len());
    let _ = writeln!(w, "certificate: {certificate}");
    let _ = writeln!(w, "zero in K: {}", if zero_in_set { "yes" } else { "no" });
    let _ = writeln!(
        w,
        "constant translate containing 0: {}",
        constant_translate.map_or("none (pins u(0)=0 and u(1)=1 disagree)".to_string(), |c| c.to_string())
    );
    let _ = writeln!(w, "resolvent precondition: FAILED ({resolvent_refusal})");
    let _ = writeln!(w, "picard steps: {n}");
    let _ = writeln!(w, "final successive gap: {}", fmt_real(path.steps[n - 1].residual_sup));
    let _ = writeln!(w, "limit at x=1: {}", fmt_real(limit[last]));
    let _ = writeln!(w, "limit at second-to-last atom: {}", fmt_real(limit[last - 1]));
    let _ = writeln!(w, "discrete lipschitz of limit: {} (max jump {})", fmt_real(lipschitz), fmt_real(max_jump));
    let _ = writeln!(
        w,
        "equicontinuity: {}",
        if equicontinuity_violated { "VIOLATED (no continuous fixed point in K)" } else { "ok" }
    );
    let _ = writeln!(
        w,
        "residual chain (eps {}): {}",
        config.epsilon,
        if chain.chain_satisfied { "satisfied" } else { "NOT satisfied" }
    );
    let _ = writeln!(w, "status: {status}");

    let artifacts = RunArtifacts {
        csv: path_csv(&path),
        summary,
        plot_data: Some(plot_columns(
            &grid,
            &[
                ("u_1".into(), &path.steps[0].solution),
                (format!("u_{n}"), &path.steps[n - 1].solution),
                ("limit".into(), &limit),
            ],
        )),
        status,
    };
    Ok(Example41Outcome {
        grid,
        set,
        certificate,
        zero_in_set,
        constant_translate,
        resolvent_refusal,
        path,
        limit,
        lipschitz,
        max_jump,
        equicontinuity_violated,
        chain,
        status,
        artifacts,
    })
}

/// Runs the counterexample and writes the CSV (and plot data) when `out` is set.
pub fn run_example41_command(
    config: &Example41Config,
    out: Option<&std::path::Path>,
) -> Result<Example41Outcome> {
    let outcome = run_example41(config)?;
    if let Some(out) = out {
        write_atomic(out, &outcome.artifacts.csv)?;
        if let Some(plot) = &outcome.artifacts.plot_data {
            write_atomic(&plot_path_for(out), plot)?;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact grid maximum of x^(k+1) (1 - x), independent of the iteration.
    fn grid_gap(grid: &MeasureGrid, k: usize) -> f64 {
        grid.atoms()
            .iter()
            .map(|&x| x.powi(k as i32 + 1) * (1.0 - x))
            .fold(0.0, f64::max)
    }

    #[test]
    fn gaps_match_grid_maximum() {
        let out = run_example41(&Example41Config::default()).unwrap();
        for (i, gap) in out.gaps().iter().enumerate() {
            let k = i + 1;
            let oracle = grid_gap(&out.grid, k);
            assert!((gap - oracle).abs() <= 1e-12 * oracle, "k={k}: {gap} vs {oracle}");
        }
    }

    #[test]
    fn gaps_track_continuous_peak_while_resolved() {
        let out = run_example41(&Example41Config::default()).unwrap();
        let gaps = out.gaps();
        for k in 20..=160 {
            let ratio = gaps[k - 1] * std::f64::consts::E * (k as f64 + 2.0);
            assert!((0.5..=2.0).contains(&ratio), "k={k}: ratio {ratio}");
        }
    }

    #[test]
    fn limit_and_status() {
        let out = run_example41(&Example41Config::default()).unwrap();
        assert!(out.certificate.passed);
        assert!(!out.zero_in_set);
        assert_eq!(out.constant_translate, None);
        assert_eq!(out.limit[63], 1.0);
        assert!(out.limit[62] < 1e-3);
        assert!((out.lipschitz - 63.0).abs() < 1e-9);
        assert!(out.equicontinuity_violated);
        assert_eq!(out.status, PathStatus::NotInSet);
        assert!(out.chain.chain_satisfied);
        assert_eq!(out.artifacts.csv.lines().count(), 201);
        assert!(out.artifacts.summary.contains("status: not-in-set"));
    }

    #[test]
    fn lipschitz_doubles_with_grid() {
        let run = |n| {
            run_example41(&Example41Config {
                grid_n: n,
                samples: 10,
                ..Example41Config::default()
            })
            .unwrap()
            .lipschitz
        };
        let ratio = run(128) / run(64);
        assert!((ratio - 2.0).abs() <= 0.02, "{ratio}");
    }

    #[test]
    fn interior_grid_rejected() {
        let c = Example41Config {
            grid_kind: GridKind::Interior,
            ..Example41Config::default()
        };
        assert!(run_example41(&c).is_err());
    }

    #[test]
    fn aitken_on_geometric_sequence() {
        let f = |r: f64| GridFunction::new(vec![r, 1.0, 0.0]).unwrap();
        let l = aitken_limit(&f(0.5), &f(0.25), &f(0.125)).unwrap();
        assert_eq!(l.values(), &[0.0, 1.0, 0.0]);
    }
}
