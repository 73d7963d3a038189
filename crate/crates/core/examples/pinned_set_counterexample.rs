//! T(u)(x) = x u(x) on continuous functions pinned to u(0) = 0, u(1) = 1:
//! no fixed point, and the iterates lose equicontinuity.

use fixpoint::scenario::{run_example41, Example41Config};

fn main() -> fixpoint::Result<()> {
    let outcome = run_example41(&Example41Config::default())?;
    print!("{}", outcome.artifacts.summary);
    let gaps = outcome.gaps();
    for k in [20, 50, 100, 150, 200] {
        let predicted = 1.0 / (std::f64::consts::E * (k as f64 + 2.0));
        println!("k {k:>3}: gap {:.4e}, 1/(e(k+2)) {predicted:.4e}", gaps[k - 1]);
    }
    for n in [32, 64, 128] {
        let r = run_example41(&Example41Config { grid_n: n, ..Example41Config::default() })?;
        println!("grid {n:>3}: Lipschitz constant of the limit {}", r.lipschitz);
    }
    Ok(())
}
