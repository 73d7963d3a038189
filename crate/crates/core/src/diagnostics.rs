//! Numerical versions of the measure-theoretic estimates behind the damped
//! scheme: discrete Egoroff exceptional sets, the residual chain
//! `int |T(u) - u| <= c eps + int_{A^c} ...`, and a check that weak-type
//! pairings and `L^p` distances vanish together.

use crate::error::{invalid, Result};
use crate::grid::{integrate_abs_diff, integrate_abs_diff_all, norm_p, norm_sup, GridFunction, MeasureGrid};
use crate::operators::{PointwiseOperator, CERTIFY_TOLERANCE};
use crate::solver::SolvePath;

/// Slack on the residual chain inequality.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EgoroffReport {
    /// Excluded atoms `A_eps`, ascending.
    pub exceptional_atoms: Vec<usize>,
    pub exceptional_measure: f64,
    /// `max_{i not in A} max_{j >= J} |u_j(x_i) - u(x_i)|`
    pub uniform_tail_deviation: f64,
    pub tail_start: usize,
    /// Per-atom tail deviation `max_{j >= J} |u_j(x_i) - u(x_i)|`.
    pub tail_deviation: Vec<f64>,
}

/// Per-atom `max_{j >= tail_start} |u_j - u|`.
pub fn tail_deviation(
    seq: &[GridFunction],
    u: &GridFunction,
    grid: &MeasureGrid,
    tail_start: usize,
) -> Result<Vec<f64>> {
    if tail_start >= seq.len() {
        return invalid(format!(
            "tail start {tail_start} must be below the sequence length {}",
            seq.len()
        ));
    }
    grid.check(u, "limit")?;
    let mut d = vec![0.0_f64; grid.len()];
    for f in &seq[tail_start..] {
        grid.check(f, "sequence element")?;
        for (di, (a, b)) in d.iter_mut().zip(f.values().iter().zip(u.values())) {
            *di = di.max((a - b).abs());
        }
    }
    Ok(d)
}

/// Greedy discrete Egoroff set.
///
/// Atoms are excluded in decreasing order of tail deviation (ties: lower
/// index first) while the excluded weight stays below `epsilon`. This
/// minimizes the deviation left on the complement among all sets of weight
/// below `epsilon`.
pub fn egoroff_split(
    seq: &[GridFunction],
    u: &GridFunction,
    grid: &MeasureGrid,
    epsilon: f64,
    tail_start: usize,
) -> Result<EgoroffReport> {
    if !(epsilon > 0.0) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let d = tail_deviation(seq, u, grid, tail_start)?;
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let w = grid.weights();
    let mut measure = 0.0;
    let mut excluded = Vec::new();
    for &i in &order {
        if measure + w[i] >= epsilon {
            break;
        }
        measure += w[i];
        excluded.push(i);
    }
    excluded.sort_unstable();
    let mut is_excluded = vec![false; d.len()];
    for &i in &excluded {
        is_excluded[i] = true;
    }
    let uniform = (0..d.len())
        .filter(|&i| !is_excluded[i])
        .map(|i| d[i])
        .fold(0.0, f64::max);
    Ok(EgoroffReport {
        exceptional_measure: measure,
        exceptional_atoms: excluded,
        uniform_tail_deviation: uniform,
        tail_start,
        tail_deviation: d,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualChainReport {
    /// `int_Omega |T(u) - u| dmu`
    pub total: f64,
    /// Observed sup of `|T(u_n) - u_n|` over the path and `|T(u) - u|`.
    pub c_bound: f64,
    pub epsilon: f64,
    /// `int_{A^c} |T(u_N) - T(u)| dmu` at the last step `N`.
    pub complement_term: f64,
    /// `int_{A^c} |u_N - u| dmu`, which dominates `complement_term`.
    pub transfer_bound: f64,
    /// `int_A |T(u) - u| dmu`
    pub exceptional_term: f64,
    /// `int_{A^c} |T(u) - u| dmu`
    pub complement_residual: f64,
    pub egoroff: EgoroffReport,
    pub chain_satisfied: bool,
}

/// Evaluates the residual chain for the candidate `u` extracted from `path`.
/// The Egoroff set is built from the second half of the path.
pub fn verify_residual_chain(
    op: &PointwiseOperator,
    path: &SolvePath,
    u: &GridFunction,
    grid: &MeasureGrid,
    epsilon: f64,
) -> Result<ResidualChainReport> {
    let last = match path.steps.last() {
        Some(s) => &s.solution,
        None => return invalid("residual chain needs a nonempty path"),
    };
    let tu = op.apply(u, grid)?;
    let total = integrate_abs_diff_all(&tu, u, grid)?;
    let c_bound = path
        .steps
        .iter()
        .map(|s| s.residual_sup)
        .fold(norm_sup(&tu.sub(u)?), f64::max);

    let seq = path.iterates();
    let egoroff = egoroff_split(&seq, u, grid, epsilon, seq.len() / 2)?;
    let mut in_a = vec![false; grid.len()];
    for &i in &egoroff.exceptional_atoms {
        in_a[i] = true;
    }
    let complement: Vec<usize> = (0..grid.len()).filter(|&i| !in_a[i]).collect();

    let t_last = op.apply(last, grid)?;
    let complement_term = integrate_abs_diff(&t_last, &tu, grid, &complement)?;
    let transfer_bound = integrate_abs_diff(last, u, grid, &complement)?;
    let exceptional_term = integrate_abs_diff(&tu, u, grid, &egoroff.exceptional_atoms)?;
    let complement_residual = integrate_abs_diff(&tu, u, grid, &complement)?;
    let chain_satisfied = total <= c_bound * epsilon + complement_term + CHAIN_TOLERANCE;
    Ok(ResidualChainReport {
        total,
        c_bound,
        epsilon,
        complement_term,
        transfer_bound,
        exceptional_term,
        complement_residual,
        egoroff,
        chain_satisfied,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCheck {
    pub holds: bool,
    /// Largest `|T(u_n) - T(u)| - |u_n - u|` seen over all steps and atoms.
    pub worst_excess: f64,
    pub comparisons: usize,
}

/// Checks `|T(u_n)(x) - T(u)(x)| <= |u_n(x) - u(x)|` at every atom of every
/// step, which integrates to the same inequality over any subset.
pub fn check_transfer(
    op: &PointwiseOperator,
    path: &SolvePath,
    u: &GridFunction,
    grid: &MeasureGrid,
) -> Result<TransferCheck> {
    let tu = op.apply(u, grid)?;
    let mut worst = f64::NEG_INFINITY;
    let mut comparisons = 0;
    for step in &path.steps {
        let tn = op.apply(&step.solution, grid)?;
        for i in 0..grid.len() {
            let excess = (tn[i] - tu[i]).abs() - (step.solution[i] - u[i]).abs();
            worst = worst.max(excess);
            comparisons += 1;
        }
    }
    Ok(TransferCheck {
        holds: worst <= CERTIFY_TOLERANCE,
        worst_excess: worst,
        comparisons,
    })
}

/// Normalized indicators (`int |g| dmu = 1`) of the `2^depth` equal cells of
/// the grid's hull; cells without atoms are skipped.
pub fn dyadic_densities(grid: &MeasureGrid, depth: u32) -> Vec<GridFunction> {
    let cells = 1usize << depth;
    let (a, b) = grid.hull();
    let width = (b - a) / cells as f64;
    let cell_of = |x: f64| {
        if width == 0.0 {
            0
        } else {
            (((x - a) / width).floor() as usize).min(cells - 1)
        }
    };
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for (i, &x) in grid.atoms().iter().enumerate() {
        members[cell_of(x)].push(i);
    }
    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| {
            let mass: f64 = m.iter().map(|&i| grid.weights()[i]).sum();
            let mut values = vec![0.0; grid.len()];
            for i in m {
                values[i] = 1.0 / mass;
            }
            GridFunction::new(values).expect("finite density")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZolezziReport {
    /// `max_k |int g_k (u_j - u) dmu|` per sequence element.
    pub pairing_gaps: Vec<f64>,
    /// `||u_j - u||_p`, indexed `[j][p]` in the order of `p_list`.
    pub lp_distances: Vec<Vec<f64>>,
    pub p_list: Vec<f64>,
    /// Over the last half of the sequence, whether pairings decreasing to
    /// zero is matched by every `L^p` distance decreasing too. A finite
    /// density family can only falsify weak convergence, so this is
    /// "consistent with", never a proof.
    pub consistent: bool,
}

impl ZolezziReport {
    pub fn pairings_vanish(&self) -> bool {
        vanishing(&self.pairing_gaps)
    }

    pub fn distances_vanish(&self, p_index: usize) -> bool {
        let series: Vec<f64> = self.lp_distances.iter().map(|d| d[p_index]).collect();
        vanishing(&series)
    }
}

/// Monotone non-increasing over the last half, and ending below where it started.
fn vanishing(series: &[f64]) -> bool {
    let tail = &series[series.len() / 2..];
    let (first, last) = match (tail.first(), tail.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return true,
    };
    if tail.iter().all(|&v| v == 0.0) {
        return true;
    }
    tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)) && last < first
}

pub fn zolezzi_check(
    seq: &[GridFunction],
    u: &GridFunction,
    grid: &MeasureGrid,
    densities: &[GridFunction],
    p_list: &[f64],
) -> Result<ZolezziReport> {
    if densities.is_empty() {
        return invalid("density family is empty");
    }
    if seq.is_empty() {
        return invalid("sequence is empty");
    }
    grid.check(u, "limit")?;
    for g in densities {
        let mass = norm_p(g, 1.0, grid)?;
        if mass > 1.0 + 1e-12 {
            return invalid(format!("density has L1 mass {mass} > 1"));
        }
    }
    let w = grid.weights();
    let mut pairing_gaps = Vec::with_capacity(seq.len());
    let mut lp_distances = Vec::with_capacity(seq.len());
    for f in seq {
        let diff = f.sub(u)?;
        let gap = densities
            .iter()
            .map(|g| {
                (0..grid.len())
                    .map(|i| w[i] * g[i] * diff[i])
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        pairing_gaps.push(gap);
        lp_distances.push(
            p_list
                .iter()
                .map(|&p| norm_p(&diff, p, grid))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut report = ZolezziReport {
        pairing_gaps,
        lp_distances,
        p_list: p_list.to_vec(),
        consistent: true,
    };
    report.consistent =
        !report.pairings_vanish() || (0..p_list.len()).all(|k| report.distances_vanish(k));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind;
    use crate::operators::BoxSet;
    use crate::solver::{approx_fixed_point_path, PathConfig};

    fn powers(grid: &MeasureGrid, count: usize) -> Vec<GridFunction> {
        (0..count)
            .map(|j| GridFunction::from_fn(grid, |x| x.powi(j as i32)).unwrap())
            .collect()
    }

    #[test]
    fn constant_sequence_has_empty_exceptional_set() {
        let g = MeasureGrid::uniform(0.0, 1.0, 10, GridKind::Interior).unwrap();
        let u = GridFunction::from_fn(&g, |x| x.sin()).unwrap();
        let seq = vec![u.clone(); 5];
        let r = egoroff_split(&seq, &u, &g, 0.3, 2).unwrap();
        // zero deviation everywhere: greedy still excludes by index, deviation stays 0
        assert_eq!(r.uniform_tail_deviation, 0.0);
        assert!(r.exceptional_measure < 0.3);
    }

    #[test]
    fn powers_exclude_right_end() {
        let g = MeasureGrid::uniform(0.0, 1.0, 32, GridKind::Interior).unwrap();
        let seq = powers(&g, 40);
        let zero = GridFunction::zeros(&g);
        let r = egoroff_split(&seq, &zero, &g, 0.1, 10).unwrap();
        assert_eq!(r.exceptional_atoms, vec![29, 30, 31]);
        assert_eq!(r.exceptional_measure, 3.0 / 32.0);
        assert_eq!(r.uniform_tail_deviation, (28.5_f64 / 32.0).powi(10));
    }

    #[test]
    fn large_epsilon_excludes_everything() {
        let g = MeasureGrid::uniform(0.0, 1.0, 8, GridKind::Interior).unwrap();
        let seq = powers(&g, 5);
        let r = egoroff_split(&seq, &GridFunction::zeros(&g), &g, 2.0, 1).unwrap();
        assert_eq!(r.exceptional_atoms.len(), 8);
        assert_eq!(r.uniform_tail_deviation, 0.0);
    }

    #[test]
    fn egoroff_argument_errors() {
        let g = MeasureGrid::uniform(0.0, 1.0, 8, GridKind::Interior).unwrap();
        let seq = powers(&g, 5);
        let zero = GridFunction::zeros(&g);
        assert!(egoroff_split(&seq, &zero, &g, 0.0, 1).is_err());
        assert!(egoroff_split(&seq, &zero, &g, 0.1, 5).is_err());
    }

    fn cos_path(n: usize) -> (MeasureGrid, PointwiseOperator, SolvePath) {
        let g = MeasureGrid::uniform(0.0, 1.0, n, GridKind::Interior).unwrap();
        let k = BoxSet::interval(&g, -1.0, 1.0).unwrap();
        let op = PointwiseOperator::parse("cos(u)").unwrap();
        let path = approx_fixed_point_path(&op, &k, &g, &PathConfig::default()).unwrap();
        (g, op, path)
    }

    #[test]
    fn identity_chain_is_trivial() {
        let g = MeasureGrid::uniform(0.0, 1.0, 8, GridKind::Interior).unwrap();
        let k = BoxSet::interval(&g, -1.0, 1.0).unwrap();
        let id = PointwiseOperator::identity();
        let path = approx_fixed_point_path(&id, &k, &g, &PathConfig::default()).unwrap();
        for eps in [1e-6, 0.1, 10.0] {
            let r = verify_residual_chain(&id, &path, &path.limit, &g, eps).unwrap();
            assert_eq!(r.total, 0.0);
            assert!(r.chain_satisfied);
        }
    }

    #[test]
    fn cos_chain() {
        let (g, op, path) = cos_path(32);
        let u = path.limit.clone();
        let r = verify_residual_chain(&op, &path, &u, &g, 0.01).unwrap();
        assert!(r.chain_satisfied);
        assert!(r.total <= 1e-6 * g.total_measure());
        assert!(r.complement_term <= r.transfer_bound + 1e-15);
        assert!((r.exceptional_term + r.complement_residual - r.total).abs() < 1e-15);
        let t = check_transfer(&op, &path, &u, &g).unwrap();
        assert!(t.holds);
        assert_eq!(t.comparisons, 20 * 32);
    }

    #[test]
    fn dyadic_family_is_normalized() {
        let g = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Interior).unwrap();
        let d = dyadic_densities(&g, 4);
        assert_eq!(d.len(), 16);
        for f in &d {
            assert!((norm_p(f, 1.0, &g).unwrap() - 1.0).abs() < 1e-12);
        }
        let node = MeasureGrid::uniform(0.0, 1.0, 9, GridKind::Node).unwrap();
        // atoms at i/8 fill the even cells, x = 1 lands in the last one
        assert_eq!(dyadic_densities(&node, 4).len(), 9);
    }

    #[test]
    fn zolezzi_constant_and_powers() {
        let g = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Interior).unwrap();
        let dens = dyadic_densities(&g, 4);
        let u = GridFunction::from_fn(&g, |x| x * x).unwrap();
        let r = zolezzi_check(&vec![u.clone(); 6], &u, &g, &dens, &[1.0, 2.0]).unwrap();
        assert!(r.pairing_gaps.iter().all(|&v| v == 0.0));
        assert!(r.lp_distances.iter().flatten().all(|&v| v == 0.0));
        assert!(r.consistent);

        let seq = powers(&g, 60);
        let zero = GridFunction::zeros(&g);
        let r = zolezzi_check(&seq, &zero, &g, &dens, &[1.0, 2.0]).unwrap();
        for (j, d) in r.lp_distances.iter().enumerate() {
            let direct: f64 = g.atoms().iter().map(|x| x.powi(j as i32) / 64.0).sum();
            assert!((d[0] - direct).abs() < 1e-14);
        }
        assert!(r.pairings_vanish());
        assert!(r.consistent);
    }

    #[test]
    fn zolezzi_flags_inconsistency() {
        // +1 / -1 + 1/j on alternating atoms: cell averages shrink like 1/j,
        // the L1 distance grows towards 1
        let g = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Interior).unwrap();
        let dens = dyadic_densities(&g, 2);
        let zero = GridFunction::zeros(&g);
        let seq: Vec<GridFunction> = (1..=10)
            .map(|j| {
                let vals = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 + 1.0 / j as f64 });
                GridFunction::new(vals.collect()).unwrap()
            })
            .collect();
        let r = zolezzi_check(&seq, &zero, &g, &dens, &[1.0]).unwrap();
        assert!(r.pairings_vanish());
        assert!(!r.distances_vanish(0));
        assert!(!r.consistent);
    }

    #[test]
    fn zolezzi_argument_errors() {
        let g = MeasureGrid::uniform(0.0, 1.0, 8, GridKind::Interior).unwrap();
        let u = GridFunction::zeros(&g);
        assert!(zolezzi_check(std::slice::from_ref(&u), &u, &g, &[], &[1.0]).is_err());
        let heavy = GridFunction::constant(&g, 2.0).unwrap();
        assert!(zolezzi_check(std::slice::from_ref(&u), &u, &g, &[heavy], &[1.0]).is_err());
        let d = dyadic_densities(&g, 1);
        assert!(zolezzi_check(std::slice::from_ref(&u), &u, &g, &d, &[0.5]).is_err());
    }
}
