//! Exceptional sets of small measure off which x^j converges uniformly.

use fixpoint::prelude::*;

fn main() -> Result<()> {
    let grid = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Node)?;
    let seq: Vec<GridFunction> = (1..=200)
        .map(|j| GridFunction::from_fn(&grid, |x| x.powi(j)))
        .collect::<Result<_>>()?;
    let limit = GridFunction::from_fn(&grid, |x| if x == 1.0 { 1.0 } else { 0.0 })?;
    for eps in [0.001, 0.01, 0.05, 0.1, 0.3] {
        let r = egoroff_split(&seq, &limit, &grid, eps, 100)?;
        println!(
            "eps {eps:<5} excluded {:>2} atoms (measure {:.4}), uniform tail deviation {:.3e}",
            r.exceptional_atoms.len(),
            r.exceptional_measure,
            r.uniform_tail_deviation
        );
    }
    Ok(())
}
