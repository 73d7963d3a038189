//! Pairing gaps against dyadic densities versus L1/L2 distances.

use fixpoint::prelude::*;

fn main() -> Result<()> {
    let grid = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Interior)?;
    let dens = dyadic_densities(&grid, 4);
    let zero = GridFunction::zeros(&grid);
    let seq: Vec<GridFunction> = (1..=40)
        .map(|j| GridFunction::from_fn(&grid, |x| x.powi(j)))
        .collect::<Result<_>>()?;
    let r = zolezzi_check(&seq, &zero, &grid, &dens, &[1.0, 2.0])?;
    println!("{:>3} {:>12} {:>12} {:>12}", "j", "gap", "L1", "L2");
    for j in (0..seq.len()).step_by(5) {
        let d = &r.lp_distances[j];
        println!("{:>3} {:>12.4e} {:>12.4e} {:>12.4e}", j + 1, r.pairing_gaps[j], d[0], d[1]);
    }
    println!("consistent with weak-to-norm convergence: {}", r.consistent);
    Ok(())
}
