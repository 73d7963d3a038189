//! Fixed points of pointwise nonexpansive operators on discretized
//! finite-measure function spaces.
//!
//! An operator `T(u)(x) = phi(x, u(x))` acting on functions over a weighted
//! 1-D grid is *strongly nonexpansive* on a set `K` when
//! `|T(u)(x) - T(v)(x)| <= |u(x) - v(x)|` at every atom. For such `T` and a
//! box set `K` containing zero, the damped equations `u_n = lambda_n T(u_n)`
//! are contractions, and letting `lambda_n -> 1` produces approximate fixed
//! points. This crate provides:
//!
//! - [`grid`]: weighted grids, grid functions, sup and `L^p` norms;
//! - [`expr`]: a small expression language for `phi(x, u)` with an
//!   interval-arithmetic Lipschitz bound;
//! - [`operators`]: operators, pinned box sets, a sampling certifier,
//!   closure combinators and problem translation;
//! - [`solver`]: Picard iteration, the resolvent, and the damped path;
//! - [`diagnostics`]: discrete Egoroff sets, the residual chain, and the
//!   weak-pairing versus `L^p` consistency check;
//! - [`scenario`]: configuration, the built-in pinned-set counterexample,
//!   and CSV/summary artifacts behind the `fixpoint` binary.
//!
//! ```
//! use fixpoint::prelude::*;
//!
//! let grid = MeasureGrid::uniform(0.0, 1.0, 32, GridKind::Interior)?;
//! let set = BoxSet::interval(&grid, -1.0, 1.0)?;
//! let op = PointwiseOperator::parse("cos(u)")?;
//! let path = approx_fixed_point_path(&op, &set, &grid, &PathConfig::default())?;
//! assert_eq!(path.status, PathStatus::FixedPointFound);
//! assert!((path.limit[0] - 0.7390851332).abs() < 1e-6);
//! # Ok::<(), fixpoint::Error>(())
//! ```

pub mod cli;
pub mod diagnostics;
mod error;
pub mod expr;
pub mod grid;
pub mod operators;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diagnostics::{
        dyadic_densities, egoroff_split, verify_residual_chain, zolezzi_check, EgoroffReport,
        ResidualChainReport, ZolezziReport,
    };
    pub use crate::expr::{lipschitz_bound_in_u, parse, Expr};
    pub use crate::grid::{
        discrete_lipschitz, integrate_abs_diff, norm_p, norm_sup, GridFunction, GridKind,
        MeasureGrid,
    };
    pub use crate::operators::{
        certify_strong_nonexpansive, translate_problem, BoxSet, CertificateReport,
        PointwiseOperator,
    };
    pub use crate::solver::{
        approx_fixed_point_path, extract_pointwise_limit, picard_solve, resolvent,
        DampingSchedule, PathConfig, PathStatus, SolvePath, SolveResult,
    };
    pub use crate::{Error, Result};
}
