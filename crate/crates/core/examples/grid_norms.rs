//! Weighted grids, Lp norms and partial integrals.

use fixpoint::prelude::*;

fn main() -> Result<()> {
    let interior = MeasureGrid::uniform(0.0, 1.0, 4, GridKind::Interior)?;
    let node = MeasureGrid::uniform(0.0, 1.0, 5, GridKind::Node)?;
    println!("interior atoms {:?} weights {:?}", interior.atoms(), interior.weights());
    println!("node atoms     {:?} weights {:?}", node.atoms(), node.weights());

    let f = GridFunction::from_fn(&interior, |x| x)?;
    let zero = GridFunction::zeros(&interior);
    for p in [1.0, 2.0, 4.0] {
        println!("||x||_{p} = {:.6}", norm_p(&f, p, &interior)?);
    }
    println!("||x||_sup = {}", norm_sup(&f));
    println!("int over the right half |x - 0| = {}", integrate_abs_diff(&f, &zero, &interior, &[2, 3])?);

    let square = GridFunction::from_fn(&node, |x| x * x)?;
    println!("discrete Lipschitz constant of x^2 on 5 nodes: {}", discrete_lipschitz(&square, &node)?);
    Ok(())
}
