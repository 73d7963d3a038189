use std::path::PathBuf;

use crate::error::{invalid, Error, Result};
use crate::expr::{parse, Expr};
use crate::grid::{GridFunction, GridKind, MeasureGrid};
use crate::operators::{BoxSet, PointwiseOperator};
use crate::solver::{DampingSchedule, PathConfig};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "FIXPOINT_SEED";

/// Everything a scenario run needs. Built from defaults, then a flat
/// `key = value` file, then command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub domain: (f64, f64),
    pub grid_n: usize,
    /// `None` lets each command pick its natural kind.
    pub grid_kind: Option<GridKind>,
    pub operator: Option<String>,
    /// Expression in `x` (or a constant).
    pub lower: String,
    pub upper: String,
    pub pins: Vec<PinSpec>,
    pub schedule: String,
    pub steps: usize,
    pub inner_tol: f64,
    pub pointwise_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub epsilon: f64,
    pub lambda: f64,
    pub tail: usize,
    pub picard_steps: usize,
}

/// Atom index for a pin; `Last` resolves against the grid size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinIndex {
    At(usize),
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinSpec {
    pub index: PinIndex,
    pub value: f64,
}

impl std::str::FromStr for PinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (idx, val) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("pin `{s}` is not idx=val")))?;
        let index = match idx.trim() {
            "last" => PinIndex::Last,
            t => PinIndex::At(
                t.parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad pin index `{t}`")))?,
            ),
        };
        let value = parse_f64("pin value", val)?;
        Ok(PinSpec { index, value })
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            domain: (0.0, 1.0),
            grid_n: 64,
            grid_kind: None,
            operator: None,
            lower: "-1".into(),
            upper: "1".into(),
            pins: Vec::new(),
            schedule: "geometric".into(),
            steps: 20,
            inner_tol: 1e-10,
            pointwise_tol: 1e-6,
            samples: 1000,
            seed: 0,
            out: None,
            epsilon: 0.01,
            lambda: 0.9,
            tail: 5,
            picard_steps: 200,
        }
    }
}

fn parse_f64(what: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("{what}: `{}` is not a finite number", s.trim())))
}

fn parse_usize(what: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what}: `{}` is not a count", s.trim())))
}

impl ScenarioConfig {
    /// Defaults with the seed taken from `FIXPOINT_SEED` when set.
    pub fn from_env() -> Result<Self> {
        let mut c = Self::default();
        if let Ok(v) = std::env::var(SEED_ENV) {
            c.set("seed", &v)?;
        }
        Ok(c)
    }

    /// Sets one key; keys match the long flag names (`grid-n`, `inner-tol`, ...),
    /// with `_` accepted for `-`. `pin` accumulates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "domain" => {
                let (a, b) = v
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidArgument(format!("domain `{v}` is not a,b")))?;
                self.domain = (parse_f64("domain", a)?, parse_f64("domain", b)?);
            }
            "grid-n" => self.grid_n = parse_usize("grid-n", v)?,
            "grid-kind" => self.grid_kind = Some(v.parse()?),
            "operator" => self.operator = Some(v.to_string()),
            "lower" => self.lower = v.to_string(),
            "upper" => self.upper = v.to_string(),
            "pin" => self.pins.push(v.parse()?),
            "schedule" => self.schedule = v.to_string(),
            "steps" => self.steps = parse_usize("steps", v)?,
            "inner-tol" => self.inner_tol = parse_f64("inner-tol", v)?,
            "pointwise-tol" => self.pointwise_tol = parse_f64("pointwise-tol", v)?,
            "samples" => self.samples = parse_usize("samples", v)?,
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("seed: `{v}` is not an integer")))?
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "epsilon" => self.epsilon = parse_f64("epsilon", v)?,
            "lambda" => self.lambda = parse_f64("lambda", v)?,
            "tail" => self.tail = parse_usize("tail", v)?,
            "picard-steps" => self.picard_steps = parse_usize("picard-steps", v)?,
            other => return invalid(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies a `key = value` file: one key per line, `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: n + 1,
                message: format!("expected key = value, got `{line}`"),
            })?;
            self.set(k, v).map_err(|e| Error::Config {
                line: n + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return invalid("grid-n must be at least 2");
        }
        if !(self.inner_tol > 0.0 && self.pointwise_tol > 0.0 && self.epsilon > 0.0) {
            return invalid("tolerances and epsilon must be positive");
        }
        if self.samples == 0 {
            return invalid("samples must be at least 1");
        }
        Ok(())
    }

    pub fn path_config(&self) -> Result<PathConfig> {
        Ok(PathConfig {
            schedule: DampingSchedule::parse(&self.schedule, self.steps)?,
            inner_tol: self.inner_tol,
            pointwise_tol: self.pointwise_tol,
            ..PathConfig::default()
        })
    }

    /// Builds grid, set and operator, using `default_kind` when no grid kind was given.
    pub fn build(&self, default_kind: GridKind) -> Result<Scenario> {
        self.validate()?;
        let text = self
            .operator
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("no operator given (--operator EXPR)".into()))?;
        let ast = parse(text)?;
        let grid = MeasureGrid::uniform(
            self.domain.0,
            self.domain.1,
            self.grid_n,
            self.grid_kind.unwrap_or(default_kind),
        )?;
        let lower = bound_function(&self.lower, &grid, "lower")?;
        let upper = bound_function(&self.upper, &grid, "upper")?;
        let pins = self
            .pins
            .iter()
            .map(|p| {
                let i = match p.index {
                    PinIndex::At(i) => i,
                    PinIndex::Last => grid.len() - 1,
                };
                (i, p.value)
            })
            .collect();
        let set = BoxSet::new(lower, upper, pins)?;
        Ok(Scenario {
            op: ast.to_operator(),
            ast,
            grid,
            set,
        })
    }
}

fn bound_function(text: &str, grid: &MeasureGrid, what: &str) -> Result<GridFunction> {
    let ast = parse(text)?;
    if ast.uses_u() {
        return invalid(format!("{what} bound may depend on x only"));
    }
    let values = grid
        .atoms()
        .iter()
        .map(|&x| ast.eval(x, 0.0).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(values)
}

/// A built problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ast: Expr,
    pub op: PointwiseOperator,
    pub grid: MeasureGrid,
    pub set: BoxSet,
}
