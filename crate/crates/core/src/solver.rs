//! Banach/Picard iteration and the damped resolvent scheme `u_n = lambda_n T(u_n)`.
//!
//! For a pointwise nonexpansive `T` and `0 in K`, `lambda T` is a pointwise
//! `lambda`-contraction of `K` into itself, so each resolvent step has a
//! unique solution found by Picard iteration. Walking `lambda_n -> 1` with
//! warm starts drives the residual `T(u_n) - u_n = ((1 - lambda_n)/lambda_n) u_n`
//! to zero.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::grid::{norm_p, norm_sup, GridFunction, MeasureGrid};
use crate::operators::{BoxSet, PointwiseOperator};

/// Slack allowed on the bounds when checking that a resolvent solution is in `K`.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Hard ceiling on inner Picard iterations.
pub const MAX_INNER_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `lambda_n = 1 - 2^-n`
    Geometric,
    /// `lambda_n = 1 - 1/(n+1)`
    Harmonic,
    Explicit,
}

/// Strictly increasing damping factors in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingSchedule {
    values: Vec<f64>,
    kind: ScheduleKind,
}

impl DampingSchedule {
    pub fn geometric(steps: usize) -> Result<Self> {
        Self::checked(
            (1..=steps).map(|n| 1.0 - 0.5_f64.powi(n as i32)).collect(),
            ScheduleKind::Geometric,
        )
    }

    pub fn harmonic(steps: usize) -> Result<Self> {
        Self::checked(
            (1..=steps).map(|n| 1.0 - 1.0 / (n as f64 + 1.0)).collect(),
            ScheduleKind::Harmonic,
        )
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::checked(values, ScheduleKind::Explicit)
    }

    /// Parses `geometric`, `harmonic` or `list:l1,l2,...`. `steps` sizes the
    /// generated kinds and is ignored for lists.
    pub fn parse(spec: &str, steps: usize) -> Result<Self> {
        match spec.trim() {
            "geometric" => Self::geometric(steps),
            "harmonic" => Self::harmonic(steps),
            s => match s.strip_prefix("list:") {
                Some(list) => {
                    let values = list
                        .split(',')
                        .map(|t| {
                            t.trim().parse::<f64>().map_err(|_| {
                                Error::InvalidArgument(format!("bad schedule value `{t}`"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Self::explicit(values)
                }
                None => invalid(format!(
                    "unknown schedule `{s}` (expected geometric|harmonic|list:...)"
                )),
            },
        }
    }

    fn checked(values: Vec<f64>, kind: ScheduleKind) -> Result<Self> {
        if values.is_empty() {
            return invalid("damping schedule is empty");
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return invalid(format!("damping factor {v} outside (0, 1)"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("damping factors must be strictly increasing");
        }
        Ok(Self { values, kind })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: GridFunction,
    pub iterations: usize,
    /// `q/(1-q) * ||u_k - u_{k-1}||_sup`, a bound on the distance to the fixed point.
    pub a_posteriori_error: f64,
    pub converged: bool,
}

/// Iterates `u_{k+1} = S(u_k)` for a pointwise `q`-contraction `S` until the
/// a-posteriori Banach bound drops to `tol`.
///
/// Hitting `max_iter` is not an error: the last iterate comes back with
/// `converged == false`.
pub fn picard_solve(
    op: &PointwiseOperator,
    q: f64,
    u0: &GridFunction,
    grid: &MeasureGrid,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    if !(q > 0.0 && q < 1.0) {
        return invalid(format!("contraction factor must lie in (0, 1), got {q}"));
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    grid.check(u0, "initial guess")?;
    let factor = q / (1.0 - q);
    let mut u = u0.clone();
    let mut bound = f64::INFINITY;
    for k in 1..=max_iter {
        let next = op.apply(&u, grid)?;
        bound = factor * next.sup_distance(&u)?;
        u = next;
        if bound <= tol {
            return Ok(SolveResult {
                solution: u,
                iterations: k,
                a_posteriori_error: bound,
                converged: true,
            });
        }
    }
    Ok(SolveResult {
        solution: u,
        iterations: max_iter,
        a_posteriori_error: bound,
        converged: false,
    })
}

/// `10 * ceil(log(tol (1 - lambda)) / log(lambda))`, capped at [`MAX_INNER_ITERATIONS`].
pub fn default_inner_max_iter(lambda: f64, tol: f64) -> usize {
    let n = ((tol * (1.0 - lambda)).ln() / lambda.ln()).ceil();
    if !n.is_finite() || n <= 0.0 {
        return MAX_INNER_ITERATIONS;
    }
    (10.0 * n).min(MAX_INNER_ITERATIONS as f64) as usize
}

/// Solves `u = lambda T(u)` in `K`.
///
/// Requires `0 in K` (use [`crate::operators::translate_problem`] otherwise).
/// A solution that leaves `K` by more than [`MEMBERSHIP_TOLERANCE`] yields
/// [`Error::SetViolation`]: `T` does not map `K` into itself.
pub fn resolvent(
    op: &PointwiseOperator,
    lambda: f64,
    set: &BoxSet,
    grid: &MeasureGrid,
    u0: &GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return invalid(format!("damping factor must lie in (0, 1), got {lambda}"));
    }
    if set.len() != grid.len() {
        return invalid("set and grid differ in atom count");
    }
    if !set.contains_zero() {
        return Err(Error::Precondition(
            "the zero function is not in K; translate the problem by a member of K first".into(),
        ));
    }
    if !set.contains_within(u0, MEMBERSHIP_TOLERANCE) {
        return invalid("initial guess is not in K");
    }
    let result = picard_solve(&op.scale(lambda)?, lambda, u0, grid, tol, max_iter)?;
    let (atom, excess) = set.violation(&result.solution)?;
    if excess > MEMBERSHIP_TOLERANCE {
        return Err(Error::SetViolation { atom, excess });
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    FixedPointFound,
    NotInSet,
    MaxSteps,
}

impl fmt::Display for PathStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStatus::FixedPointFound => "fixed-point-found",
            PathStatus::NotInSet => "not-in-set",
            PathStatus::MaxSteps => "max-steps",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub lambda: f64,
    pub solution: GridFunction,
    /// `||T(u_n) - u_n||_sup`
    pub residual_sup: f64,
    /// `||T(u_n) - u_n||_1`
    pub residual_l1: f64,
    pub inner_iterations: usize,
}

impl StepRecord {
    pub fn new(
        op: &PointwiseOperator,
        grid: &MeasureGrid,
        lambda: f64,
        solution: GridFunction,
        inner_iterations: usize,
    ) -> Result<Self> {
        let r = op.apply(&solution, grid)?.sub(&solution)?;
        Ok(Self {
            lambda,
            residual_sup: norm_sup(&r),
            residual_l1: norm_p(&r, 1.0, grid)?,
            solution,
            inner_iterations,
        })
    }
}

/// Sequence of resolvent solutions and the terminal candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvePath {
    pub steps: Vec<StepRecord>,
    /// `u_N`, the last accepted iterate.
    pub limit: GridFunction,
    pub status: PathStatus,
    /// Schedule index whose resolvent left `K` or ran out of iterations.
    pub failed_step: Option<usize>,
}

impl SolvePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn iterates(&self) -> Vec<GridFunction> {
        self.steps.iter().map(|s| s.solution.clone()).collect()
    }

    pub fn final_residual_sup(&self) -> Option<f64> {
        self.steps.last().map(|s| s.residual_sup)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub schedule: DampingSchedule,
    pub inner_tol: f64,
    pub pointwise_tol: f64,
    /// Start each resolvent from the previous solution instead of zero.
    pub warm_start: bool,
    /// Overrides [`default_inner_max_iter`].
    pub inner_max_iter: Option<usize>,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            schedule: DampingSchedule::geometric(20).expect("valid schedule"),
            inner_tol: 1e-10,
            pointwise_tol: 1e-6,
            warm_start: true,
            inner_max_iter: None,
        }
    }
}

/// `tol`, raised to the smallest Banach bound `lambda/(1-lambda) * gap` that a
/// Picard step can still certify when `gap` is stuck at a couple of ulps of
/// the largest value in `K`.
pub fn attainable_tol(lambda: f64, tol: f64, set: &BoxSet) -> f64 {
    let scale = set
        .lower()
        .values()
        .iter()
        .chain(set.upper().values())
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    tol.max(lambda / (1.0 - lambda) * 2.0 * f64::EPSILON * scale)
}

/// Runs the resolvent for every damping factor in the schedule. Each inner
/// solve uses [`attainable_tol`].
pub fn approx_fixed_point_path(
    op: &PointwiseOperator,
    set: &BoxSet,
    grid: &MeasureGrid,
    config: &PathConfig,
) -> Result<SolvePath> {
    if !(config.inner_tol > 0.0 && config.pointwise_tol > 0.0) {
        return invalid("tolerances must be positive");
    }
    if !set.contains_zero() {
        return Err(Error::Precondition(
            "the zero function is not in K; translate the problem by a member of K first".into(),
        ));
    }
    let zero = GridFunction::zeros(grid);
    let mut steps: Vec<StepRecord> = Vec::with_capacity(config.schedule.len());
    let mut failed_step = None;
    let mut status = None;
    for (n, &lambda) in config.schedule.values().iter().enumerate() {
        let start = match steps.last() {
            Some(prev) if config.warm_start => &prev.solution,
            _ => &zero,
        };
        let tol = attainable_tol(lambda, config.inner_tol, set);
        let max_iter = config
            .inner_max_iter
            .unwrap_or_else(|| default_inner_max_iter(lambda, tol));
        let solved = match resolvent(op, lambda, set, grid, start, tol, max_iter) {
            Ok(r) => r,
            Err(Error::SetViolation { .. }) => {
                failed_step = Some(n);
                status = Some(PathStatus::NotInSet);
                break;
            }
            Err(e) => return Err(e),
        };
        let converged = solved.converged;
        steps.push(StepRecord::new(op, grid, lambda, solved.solution, solved.iterations)?);
        if !converged {
            failed_step = Some(n);
            status = Some(PathStatus::MaxSteps);
            break;
        }
    }
    let limit = steps.last().map_or(zero, |s| s.solution.clone());
    let status = status.unwrap_or_else(|| {
        let done = steps
            .last()
            .is_some_and(|s| s.residual_sup <= config.pointwise_tol)
            && set.contains_within(&limit, MEMBERSHIP_TOLERANCE);
        if done {
            PathStatus::FixedPointFound
        } else {
            PathStatus::MaxSteps
        }
    });
    Ok(SolvePath {
        steps,
        limit,
        status,
        failed_step,
    })
}

/// Atom-wise mean of the last `tail` iterates and the largest atom-wise
/// spread (max - min) among them.
pub fn extract_pointwise_limit(path: &SolvePath, tail: usize) -> Result<(GridFunction, f64)> {
    if tail == 0 || tail > path.len() {
        return invalid(format!(
            "tail must be between 1 and the path length {}, got {tail}",
            path.len()
        ));
    }
    let window = &path.steps[path.len() - tail..];
    let atoms = window[0].solution.len();
    let mut mean = Vec::with_capacity(atoms);
    let mut oscillation = 0.0_f64;
    for i in 0..atoms {
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for s in window {
            let v = s.solution[i];
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        mean.push(sum / tail as f64);
        oscillation = oscillation.max(hi - lo);
    }
    Ok((GridFunction::new(mean)?, oscillation))
}
