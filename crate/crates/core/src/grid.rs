//! Finite weighted atom sets standing in for a finite measure space on an
//! interval, plus the grid functions living on them.
//!
//! "Almost everywhere" statements become "at every atom". Interior grids use
//! midpoint weights, node grids use trapezoid weights and include both
//! endpoints so that boundary values can be pinned.

use std::fmt;

use crate::error::{invalid, Result};

/// Placement of atoms inside `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    /// Cell midpoints, equal weights.
    Interior,
    /// Nodes including both endpoints, trapezoid weights.
    Node,
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridKind::Interior => f.write_str("interior"),
            GridKind::Node => f.write_str("node"),
        }
    }
}

impl std::str::FromStr for GridKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "interior" => Ok(GridKind::Interior),
            "node" => Ok(GridKind::Node),
            other => invalid(format!("unknown grid kind `{other}` (expected interior|node)")),
        }
    }
}

/// Discrete finite measure: strictly increasing atoms with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureGrid {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    kind: GridKind,
}

impl MeasureGrid {
    /// Builds a grid from explicit atoms and weights.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>, kind: GridKind) -> Result<Self> {
        if atoms.is_empty() {
            return invalid("grid needs at least one atom");
        }
        if atoms.len() != weights.len() {
            return invalid(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            ));
        }
        if atoms.iter().any(|x| !x.is_finite()) {
            return invalid("atoms must be finite");
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("atoms must be strictly increasing");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return invalid("weights must be finite and positive");
        }
        Ok(Self {
            atoms,
            weights,
            kind,
        })
    }

    /// Uniform grid on `[a, b]` with `n` atoms.
    ///
    /// Interior grids take the midpoints of `n` equal cells, each with weight
    /// `(b - a) / n`. Node grids take `n` equally spaced points from `a` to `b`
    /// with trapezoid weights. Both have total measure `b - a`.
    pub fn uniform(a: f64, b: f64, n: usize, kind: GridKind) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return invalid("grid bounds must be finite");
        }
        if a >= b {
            return invalid(format!("grid bounds must satisfy a < b, got [{a}, {b}]"));
        }
        if n < 2 {
            return invalid(format!("grid needs n >= 2 atoms, got {n}"));
        }
        let len = b - a;
        let (atoms, weights) = match kind {
            GridKind::Interior => {
                let h = len / n as f64;
                let atoms = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
                (atoms, vec![h; n])
            }
            GridKind::Node => {
                let h = len / (n - 1) as f64;
                let atoms = (0..n)
                    .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
                    .collect();
                let mut weights = vec![h; n];
                weights[0] = 0.5 * h;
                weights[n - 1] = 0.5 * h;
                (atoms, weights)
            }
        };
        Self::new(atoms, weights, kind)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Smallest interval containing every atom.
    pub fn hull(&self) -> (f64, f64) {
        (self.atoms[0], self.atoms[self.atoms.len() - 1])
    }

    /// Index of the atom located exactly at `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.total_cmp(&x)).ok()
    }

    pub(crate) fn check(&self, f: &GridFunction, what: &str) -> Result<()> {
        if f.len() != self.len() {
            return invalid(format!(
                "{what} has {} values but the grid has {} atoms",
                f.len(),
                self.len()
            ));
        }
        Ok(())
    }
}

/// One finite real value per atom of a [`MeasureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("grid function needs at least one value");
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("grid function value at atom {i} is not finite"));
        }
        Ok(Self { values })
    }

    pub fn constant(grid: &MeasureGrid, c: f64) -> Result<Self> {
        Self::new(vec![c; grid.len()])
    }

    pub fn zeros(grid: &MeasureGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f` at every atom.
    pub fn from_fn(grid: &MeasureGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.atoms().iter().map(|&x| f(x)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Combines two functions atom by atom.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.len() != other.len() {
            return invalid(format!(
                "grid functions differ in length ({} vs {})",
                self.len(),
                other.len()
            ));
        }
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `max_i |self_i - other_i|`.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        Ok(norm_sup(&self.sub(other)?))
    }
}

impl std::ops::Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Essential supremum on the grid: `max_i |f_i|`.
pub fn norm_sup(f: &GridFunction) -> f64 {
    f.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `(sum_i mu_i |f_i|^p)^(1/p)` for `p >= 1`.
pub fn norm_p(f: &GridFunction, p: f64, grid: &MeasureGrid) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("p must be a finite real >= 1, got {p}"));
    }
    grid.check(f, "function")?;
    let weighted = f.values.iter().zip(grid.weights());
    if p == 1.0 {
        return Ok(weighted.map(|(v, w)| w * v.abs()).sum());
    }
    let sum: f64 = weighted.map(|(v, w)| w * v.abs().powf(p)).sum();
    Ok(sum.powf(1.0 / p))
}

/// `sum_{i in subset} mu_i |f_i - h_i|`.
pub fn integrate_abs_diff(
    f: &GridFunction,
    h: &GridFunction,
    grid: &MeasureGrid,
    subset: &[usize],
) -> Result<f64> {
    grid.check(f, "first function")?;
    grid.check(h, "second function")?;
    if let Some(&i) = subset.iter().find(|&&i| i >= grid.len()) {
        return invalid(format!("atom index {i} out of range for {} atoms", grid.len()));
    }
    let w = grid.weights();
    Ok(subset
        .iter()
        .map(|&i| w[i] * (f.values[i] - h.values[i]).abs())
        .sum())
}

/// [`integrate_abs_diff`] over every atom.
pub fn integrate_abs_diff_all(f: &GridFunction, h: &GridFunction, grid: &MeasureGrid) -> Result<f64> {
    let all: Vec<usize> = (0..grid.len()).collect();
    integrate_abs_diff(f, h, grid, &all)
}

/// Largest difference quotient `|f_{i+1} - f_i| / (x_{i+1} - x_i)`.
pub fn discrete_lipschitz(f: &GridFunction, grid: &MeasureGrid) -> Result<f64> {
    grid.check(f, "function")?;
    let x = grid.atoms();
    Ok((1..grid.len())
        .map(|i| (f.values[i] - f.values[i - 1]).abs() / (x[i] - x[i - 1]))
        .fold(0.0, f64::max))
}
