//! Picard iteration and the damped resolvent u = lambda T(u).

use fixpoint::prelude::*;

fn main() -> Result<()> {
    let grid = MeasureGrid::uniform(0.0, 1.0, 32, GridKind::Interior)?;
    let set = BoxSet::interval(&grid, -1.0, 1.0)?;
    let cos = PointwiseOperator::parse("cos(u)")?;
    let zero = GridFunction::zeros(&grid);

    for lambda in [0.5, 0.9, 0.99, 0.999] {
        let r = resolvent(&cos, lambda, &set, &grid, &zero, 1e-12, 1_000_000)?;
        println!(
            "lambda {lambda:<6} r = {:.15} after {:>5} iterations (bound {:.1e})",
            r.solution[0], r.iterations, r.a_posteriori_error
        );
    }

    let pinned = BoxSet::interval(&grid, 1.0, 2.0)?;
    match resolvent(&cos, 0.9, &pinned, &grid, &zero, 1e-12, 1000) {
        Err(e) => println!("K = [1, 2]: {e}"),
        Ok(_) => unreachable!(),
    }

    let half = PointwiseOperator::parse("0.5*u")?;
    let r = picard_solve(&half, 0.5, &GridFunction::constant(&grid, 1.0)?, &grid, 1e-8, 100)?;
    println!("u -> u/2 from 1: {} iterations, sup {:.1e}", r.iterations, norm_sup(&r.solution));
    Ok(())
}
