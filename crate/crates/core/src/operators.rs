//! Pointwise operators `T(u)(x) = phi(x, u(x))`, pinned box sets `K`, and a
//! sampling certifier for the pointwise bound
//! `|T(u)(x) - T(v)(x)| <= |u(x) - v(x)|`.
//!
//! The certifier can only find violations; passing `N` samples is evidence,
//! not proof. [`crate::expr::lipschitz_bound_in_u`] gives a constructive
//! sufficient condition for expression operators.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::grid::{GridFunction, MeasureGrid};

/// Absolute slack on the certified inequality.
pub const CERTIFY_TOLERANCE: f64 = 1e-12;

type Rule = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// The map `T`, evaluated atom by atom from `(x, u(x))`.
#[derive(Clone)]
pub struct PointwiseOperator {
    rule: Arc<Rule>,
    description: String,
}

impl fmt::Debug for PointwiseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointwiseOperator")
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

impl PointwiseOperator {
    pub fn new(
        description: impl Into<String>,
        rule: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            rule: Arc::new(rule),
            description: description.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new("u", |_, s| s)
    }

    /// Parses an expression in `x` and `u`.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(crate::expr::parse(text)?.to_operator())
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Raw rule evaluation at a single point.
    pub fn eval(&self, x: f64, s: f64) -> f64 {
        (self.rule)(x, s)
    }

    /// `T(u)`; fails on the first atom whose output is not finite.
    pub fn apply(&self, u: &GridFunction, grid: &MeasureGrid) -> Result<GridFunction> {
        grid.check(u, "argument")?;
        let values = grid
            .atoms()
            .iter()
            .zip(u.values())
            .enumerate()
            .map(|(atom, (&x, &s))| {
                let y = self.eval(x, s);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::OperatorEvaluation { atom, x, s })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(values)
    }

    /// `lambda * T`, for `lambda` in `(0, 1]`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return invalid(format!("scale factor must lie in (0, 1], got {lambda}"));
        }
        let rule = Arc::clone(&self.rule);
        Ok(Self::new(
            format!("{lambda} * ({})", self.description),
            move |x, s| lambda * rule(x, s),
        ))
    }

    /// `theta * a + (1 - theta) * b`, for `theta` in `[0, 1]`.
    pub fn convex_combine(theta: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return invalid(format!("convex weight must lie in [0, 1], got {theta}"));
        }
        let (ra, rb) = (Arc::clone(&a.rule), Arc::clone(&b.rule));
        Ok(Self::new(
            format!("{theta} * ({}) + {} * ({})", a.description, 1.0 - theta, b.description),
            move |x, s| theta * ra(x, s) + (1.0 - theta) * rb(x, s),
        ))
    }

    /// `self` after `inner`: `(x, s) -> self(x, inner(x, s))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let (outer, inner_rule) = (Arc::clone(&self.rule), Arc::clone(&inner.rule));
        Self::new(
            format!("({}) o ({})", self.description, inner.description),
            move |x, s| outer(x, inner_rule(x, s)),
        )
    }
}

/// Pointwise interval constraints with optional equality pins.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lower: GridFunction,
    upper: GridFunction,
    pins: Vec<(usize, f64)>,
}

impl BoxSet {
    pub fn new(lower: GridFunction, upper: GridFunction, pins: Vec<(usize, f64)>) -> Result<Self> {
        if lower.len() != upper.len() {
            return invalid("lower and upper bounds differ in length");
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return invalid(format!(
                "empty set: lower {} > upper {} at atom {i}",
                lower[i], upper[i]
            ));
        }
        let mut pins = pins;
        pins.sort_by_key(|&(i, _)| i);
        for w in pins.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                return invalid(format!("atom {} pinned to two different values", w[0].0));
            }
        }
        pins.dedup_by_key(|p| p.0);
        for &(i, v) in &pins {
            if i >= lower.len() {
                return invalid(format!("pin index {i} out of range"));
            }
            if !v.is_finite() || v < lower[i] || v > upper[i] {
                return invalid(format!(
                    "pin u[{i}] = {v} outside [{}, {}]",
                    lower[i], upper[i]
                ));
            }
        }
        Ok(Self { lower, upper, pins })
    }

    /// Constant bounds `lo <= u <= hi` on every atom.
    pub fn interval(grid: &MeasureGrid, lo: f64, hi: f64) -> Result<Self> {
        Self::new(
            GridFunction::constant(grid, lo)?,
            GridFunction::constant(grid, hi)?,
            Vec::new(),
        )
    }

    pub fn with_pins(self, pins: Vec<(usize, f64)>) -> Result<Self> {
        let mut all = self.pins;
        all.extend(pins);
        Self::new(self.lower, self.upper, all)
    }

    pub fn lower(&self) -> &GridFunction {
        &self.lower
    }

    pub fn upper(&self) -> &GridFunction {
        &self.upper
    }

    pub fn pins(&self) -> &[(usize, f64)] {
        &self.pins
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Largest constraint violation of `u` and where it happens; zero means `u` is in `K`.
    pub fn violation(&self, u: &GridFunction) -> Result<(usize, f64)> {
        if u.len() != self.len() {
            return invalid(format!(
                "function has {} values but the set has {} atoms",
                u.len(),
                self.len()
            ));
        }
        let mut worst = (0, 0.0);
        let mut note = |i: usize, e: f64| {
            if e > worst.1 {
                worst = (i, e);
            }
        };
        for i in 0..u.len() {
            note(i, self.lower[i] - u[i]);
            note(i, u[i] - self.upper[i]);
        }
        for &(i, v) in &self.pins {
            note(i, (u[i] - v).abs());
        }
        Ok(worst)
    }

    /// Exact membership.
    pub fn contains(&self, u: &GridFunction) -> bool {
        self.contains_within(u, 0.0)
    }

    pub fn contains_within(&self, u: &GridFunction, tol: f64) -> bool {
        matches!(self.violation(u), Ok((_, e)) if e <= tol)
    }

    pub fn contains_zero(&self) -> bool {
        (0..self.len()).all(|i| self.lower[i] <= 0.0 && 0.0 <= self.upper[i])
            && self.pins.iter().all(|&(_, v)| v == 0.0)
    }

    /// A constant function in `K` closest to zero, if any exists.
    ///
    /// Pins must all agree for one to exist, which rules out sets such as
    /// `u(0) = 0, u(1) = 1`.
    pub fn constant_member(&self) -> Option<f64> {
        let lo = self.lower.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hi = self.upper.values().iter().copied().fold(f64::INFINITY, f64::min);
        if lo > hi {
            return None;
        }
        match self.pins.first() {
            Some(&(_, c)) => {
                (self.pins.iter().all(|&(_, v)| v == c) && lo <= c && c <= hi).then_some(c)
            }
            None => Some(0.0_f64.clamp(lo, hi)),
        }
    }

    /// Draws a member uniformly per atom; pinned atoms take their pin value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let mut values: Vec<f64> = (0..self.len())
            .map(|i| {
                let (lo, hi) = (self.lower[i], self.upper[i]);
                lo + (hi - lo) * rng.gen::<f64>()
            })
            .collect();
        for &(i, v) in &self.pins {
            values[i] = v;
        }
        GridFunction::new(values).expect("bounds are finite")
    }

    /// `K - v`.
    pub fn translate(&self, v: &GridFunction) -> Result<Self> {
        Self::new(
            self.lower.sub(v)?,
            self.upper.sub(v)?,
            self.pins.iter().map(|&(i, p)| (i, p - v[i])).collect(),
        )
    }
}

/// A sampled pair violating the pointwise bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub sample: usize,
    pub atom: usize,
    pub u: GridFunction,
    pub v: GridFunction,
    /// `|T(u)(x) - T(v)(x)|`
    pub lhs: f64,
    /// `|u(x) - v(x)|`
    pub rhs: f64,
}

impl Witness {
    /// Re-evaluates the pair and confirms the violation.
    pub fn reproduces(&self, op: &PointwiseOperator, grid: &MeasureGrid) -> bool {
        let x = grid.atoms()[self.atom];
        let lhs = (op.eval(x, self.u[self.atom]) - op.eval(x, self.v[self.atom])).abs();
        let rhs = (self.u[self.atom] - self.v[self.atom]).abs();
        lhs > rhs + CERTIFY_TOLERANCE
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sample {} atom {}: |T(u)-T(v)| = {:.17e} > |u-v| = {:.17e} (u = {:.17e}, v = {:.17e})",
            self.sample, self.atom, self.lhs, self.rhs, self.u[self.atom], self.v[self.atom]
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub passed: bool,
    pub samples_checked: usize,
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(
                f,
                "PASSED: no violation in {} sample pairs (seed {})",
                self.samples_checked, self.seed
            ),
            Some(w) => write!(f, "FAILED (seed {}): witness {w}", self.seed),
        }
    }
}

/// Samples `samples` pairs from `set` and checks the pointwise bound at every
/// atom, stopping at the first violation in (sample, atom) order.
pub fn certify_strong_nonexpansive(
    op: &PointwiseOperator,
    set: &BoxSet,
    grid: &MeasureGrid,
    samples: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if samples == 0 {
        return invalid("certification needs at least one sample");
    }
    if set.len() != grid.len() {
        return invalid("set and grid differ in atom count");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let u = set.sample(&mut rng);
        let v = set.sample(&mut rng);
        let tu = op.apply(&u, grid)?;
        let tv = op.apply(&v, grid)?;
        for atom in 0..grid.len() {
            let lhs = (tu[atom] - tv[atom]).abs();
            let rhs = (u[atom] - v[atom]).abs();
            if lhs > rhs + CERTIFY_TOLERANCE {
                return Ok(CertificateReport {
                    passed: false,
                    samples_checked: sample + 1,
                    witness: Some(Witness {
                        sample,
                        atom,
                        u,
                        v,
                        lhs,
                        rhs,
                    }),
                    seed,
                });
            }
        }
    }
    Ok(CertificateReport {
        passed: true,
        samples_checked: samples,
        witness: None,
        seed,
    })
}

/// Shifts the problem by `v in K`: returns `K' = K - v` and
/// `T'(w) = T(w + v) - v`, so that `0 in K'` and fixed points correspond via
/// `u = w + v`.
///
/// `T'` looks up `v` by atom position and is only defined on `grid`'s atoms.
pub fn translate_problem(
    set: &BoxSet,
    op: &PointwiseOperator,
    v: &GridFunction,
    grid: &MeasureGrid,
) -> Result<(BoxSet, PointwiseOperator)> {
    grid.check(v, "translation")?;
    if set.len() != grid.len() {
        return invalid("set and grid differ in atom count");
    }
    let (atom, excess) = set.violation(v)?;
    if excess > 0.0 {
        return invalid(format!(
            "translation is not a member of K (violation {excess:e} at atom {atom})"
        ));
    }
    let shifted = set.translate(v)?;
    let atoms = grid.atoms().to_vec();
    let shift = v.values().to_vec();
    let rule = Arc::clone(&op.rule);
    let translated = PointwiseOperator::new(
        format!("({}) shifted", op.description),
        move |x, s| match atoms.binary_search_by(|a| a.total_cmp(&x)) {
            Ok(i) => rule(x, s + shift[i]) - shift[i],
            Err(_) => f64::NAN,
        },
    );
    Ok((shifted, translated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{norm_sup, GridKind};

    fn unit_interior(n: usize) -> MeasureGrid {
        MeasureGrid::uniform(0.0, 1.0, n, GridKind::Interior).unwrap()
    }

    fn pinned_set(grid: &MeasureGrid) -> BoxSet {
        let last = grid.len() - 1;
        BoxSet::interval(grid, 0.0, 1.0)
            .unwrap()
            .with_pins(vec![(0, 0.0), (last, 1.0)])
            .unwrap()
    }

    #[test]
    fn apply_examples() {
        let g = unit_interior(8);
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let xu = PointwiseOperator::new("x*u", |x, s| x * s);
        assert_eq!(xu.apply(&one, &g).unwrap().values(), g.atoms());
        let u = GridFunction::from_fn(&g, |x| x * x - 3.0).unwrap();
        assert_eq!(PointwiseOperator::identity().apply(&u, &g).unwrap(), u);
        let cos = PointwiseOperator::new("cos(u)", |_, s| s.cos());
        let r = cos.apply(&GridFunction::zeros(&g), &g).unwrap();
        assert!(r.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn apply_reports_bad_atom() {
        let g = unit_interior(4);
        let op = PointwiseOperator::new("1/(x-0.625)", |x, _| 1.0 / (x - 0.625));
        match op.apply(&GridFunction::zeros(&g), &g) {
            Err(Error::OperatorEvaluation { atom, x, .. }) => {
                assert_eq!(atom, 2);
                assert_eq!(x, 0.625);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certify_example_operator() {
        let g = MeasureGrid::uniform(0.0, 1.0, 16, GridKind::Node).unwrap();
        let k = pinned_set(&g);
        let xu = PointwiseOperator::parse("x*u").unwrap();
        let r = certify_strong_nonexpansive(&xu, &k, &g, 500, 3).unwrap();
        assert!(r.passed);
        assert_eq!(r.samples_checked, 500);
        assert!(r.witness.is_none());
    }

    #[test]
    fn certify_rejects_doubling() {
        let g = unit_interior(8);
        let k = BoxSet::interval(&g, -1.0, 1.0).unwrap();
        let op = PointwiseOperator::parse("2*u").unwrap();
        let r = certify_strong_nonexpansive(&op, &k, &g, 100, 42).unwrap();
        assert!(!r.passed);
        let w = r.witness.as_ref().unwrap();
        assert_eq!((w.sample, w.atom), (0, 0));
        assert!(w.lhs > w.rhs + CERTIFY_TOLERANCE);
        assert!(w.reproduces(&op, &g));
    }

    #[test]
    fn certify_cos_and_is_deterministic() {
        let g = unit_interior(8);
        let k = BoxSet::interval(&g, -3.0, 3.0).unwrap();
        let op = PointwiseOperator::parse("cos(u)").unwrap();
        let a = certify_strong_nonexpansive(&op, &k, &g, 300, 9).unwrap();
        let b = certify_strong_nonexpansive(&op, &k, &g, 300, 9).unwrap();
        assert!(a.passed);
        assert_eq!(a, b);
        assert!(certify_strong_nonexpansive(&op, &k, &g, 0, 9).is_err());
    }

    #[test]
    fn sampling_respects_pins() {
        let g = MeasureGrid::uniform(0.0, 1.0, 6, GridKind::Node).unwrap();
        let k = pinned_set(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = k.sample(&mut rng);
            assert!(k.contains(&u));
            assert_eq!((u[0], u[5]), (0.0, 1.0));
        }
    }

    #[test]
    fn box_set_validation() {
        let g = unit_interior(4);
        assert!(BoxSet::interval(&g, 1.0, 0.0).is_err());
        let k = BoxSet::interval(&g, 0.0, 1.0).unwrap();
        assert!(k.clone().with_pins(vec![(1, 2.0)]).is_err());
        assert!(k.clone().with_pins(vec![(9, 0.5)]).is_err());
        assert!(k.clone().with_pins(vec![(1, 0.5), (1, 0.25)]).is_err());
        assert_eq!(k.with_pins(vec![(1, 0.5), (1, 0.5)]).unwrap().pins(), &[(1, 0.5)]);
    }

    #[test]
    fn zero_and_constant_members() {
        let g = MeasureGrid::uniform(0.0, 1.0, 5, GridKind::Node).unwrap();
        let k = pinned_set(&g);
        assert!(!k.contains_zero());
        assert_eq!(k.constant_member(), None);
        let shifted = BoxSet::interval(&g, 1.0, 2.0).unwrap();
        assert_eq!(shifted.constant_member(), Some(1.0));
        let sym = BoxSet::interval(&g, -1.0, 1.0).unwrap();
        assert!(sym.contains_zero());
        assert_eq!(sym.constant_member(), Some(0.0));
    }

    #[test]
    fn scale_and_combine() {
        let g = unit_interior(4);
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let id = PointwiseOperator::identity();
        let half = id.scale(0.5).unwrap().apply(&one, &g).unwrap();
        assert!(half.values().iter().all(|&v| v == 0.5));
        let xu = PointwiseOperator::parse("x*u").unwrap();
        let r = xu.scale(0.9).unwrap().apply(&one, &g).unwrap();
        for (v, x) in r.values().iter().zip(g.atoms()) {
            assert_eq!(*v, 0.9 * x);
        }
        assert_eq!(xu.scale(1.0).unwrap().apply(&one, &g).unwrap(), xu.apply(&one, &g).unwrap());
        assert!(id.scale(0.0).is_err());
        assert!(id.scale(1.5).is_err());

        let neg = PointwiseOperator::parse("-u").unwrap();
        let zero = PointwiseOperator::convex_combine(0.5, &id, &neg).unwrap();
        let u = GridFunction::from_fn(&g, |x| 3.0 * x - 1.0).unwrap();
        assert_eq!(norm_sup(&zero.apply(&u, &g).unwrap()), 0.0);
        let first = PointwiseOperator::convex_combine(1.0, &xu, &neg).unwrap();
        assert_eq!(first.apply(&u, &g).unwrap(), xu.apply(&u, &g).unwrap());
        assert!(PointwiseOperator::convex_combine(-0.1, &id, &neg).is_err());
    }

    #[test]
    fn composition() {
        let g = unit_interior(4);
        let xu = PointwiseOperator::parse("x*u").unwrap();
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let sq = xu.compose(&xu).apply(&one, &g).unwrap();
        for (v, x) in sq.values().iter().zip(g.atoms()) {
            assert_eq!(*v, x * x);
        }
        let u = GridFunction::from_fn(&g, |x| x.sin()).unwrap();
        let id = PointwiseOperator::identity();
        assert_eq!(id.compose(&xu).apply(&u, &g).unwrap(), xu.apply(&u, &g).unwrap());
    }

    #[test]
    fn translation() {
        let g = unit_interior(4);
        let k = BoxSet::interval(&g, 1.0, 2.0).unwrap();
        let op = PointwiseOperator::parse("0.5*u + 0.75").unwrap();
        let v = GridFunction::constant(&g, 1.0).unwrap();
        let (k2, op2) = translate_problem(&k, &op, &v, &g).unwrap();
        assert!(k2.contains_zero());
        assert_eq!(k2.lower().values(), &[0.0; 4]);
        assert_eq!(k2.upper().values(), &[1.0; 4]);
        // the fixed point 1.5 of T maps to 0.5 of T'
        let w = GridFunction::constant(&g, 0.5).unwrap();
        assert_eq!(op2.apply(&w, &g).unwrap(), w);

        let zero = GridFunction::zeros(&g);
        let sym = BoxSet::interval(&g, -1.0, 1.0).unwrap();
        let (k3, op3) = translate_problem(&sym, &op, &zero, &g).unwrap();
        assert_eq!(k3, sym);
        let u = GridFunction::from_fn(&g, |x| x - 0.3).unwrap();
        assert_eq!(op3.apply(&u, &g).unwrap(), op.apply(&u, &g).unwrap());

        let outside = GridFunction::constant(&g, 5.0).unwrap();
        assert!(translate_problem(&k, &op, &outside, &g).is_err());
    }
}
