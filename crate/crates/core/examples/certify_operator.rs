//! Sampling certificate for pointwise 1-Lipschitz operators, with witnesses.

use fixpoint::prelude::*;

fn main() -> Result<()> {
    let grid = MeasureGrid::uniform(0.0, 1.0, 64, GridKind::Interior)?;
    let set = BoxSet::interval(&grid, -1.0, 1.0)?;
    let sine = PointwiseOperator::parse("0.5*u + 0.25*sin(u)")?;
    let double = PointwiseOperator::parse("2*u")?;
    let tilt = PointwiseOperator::parse("tanh(u - x)")?;

    let candidates = [
        sine.clone(),
        double.clone(),
        sine.scale(0.9)?,
        PointwiseOperator::convex_combine(0.3, &sine, &tilt)?,
        sine.compose(&tilt),
    ];
    for op in &candidates {
        let report = certify_strong_nonexpansive(op, &set, &grid, 1000, 42)?;
        println!("{:40} {report}", op.description());
        if let Some(w) = &report.witness {
            println!("{:40} witness reproduces: {}", "", w.reproduces(op, &grid));
        }
    }

    // a set without 0 is shifted by one of its members
    let shifted = BoxSet::interval(&grid, 1.0, 2.0)?;
    let v = GridFunction::constant(&grid, 1.0)?;
    let (k2, t2) = translate_problem(&shifted, &sine, &v, &grid)?;
    println!("translated set contains 0: {}", k2.contains_zero());
    println!("{}", certify_strong_nonexpansive(&t2, &k2, &grid, 1000, 42)?);
    Ok(())
}
