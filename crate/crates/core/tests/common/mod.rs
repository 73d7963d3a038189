//! Test-only oracles shared by the integration suites.
#![allow(dead_code)]

use std::rc::Rc;

use fixpoint::grid::MeasureGrid;
use rand::Rng;

/// Root of `r = lambda cos r` on [0, 1] by bisection.
pub fn damped_cos_root(lambda: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - lambda * mid.cos() < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A random expression in canonical printed form, with a closure computing
/// the same value by direct recursion.
#[derive(Clone)]
pub struct GenExpr {
    pub text: String,
    pub prec: u8,
    pub f: Rc<dyn Fn(f64, f64) -> f64>,
    pub polynomial: bool,
}

fn leaf<R: Rng>(rng: &mut R) -> GenExpr {
    match rng.gen_range(0..3) {
        0 => {
            let v = rng.gen_range(0..40) as f64 / 8.0;
            GenExpr { text: format!("{v}"), prec: 4, f: Rc::new(move |_, _| v), polynomial: true }
        }
        1 => GenExpr { text: "x".into(), prec: 4, f: Rc::new(|x, _| x), polynomial: true },
        _ => GenExpr { text: "u".into(), prec: 4, f: Rc::new(|_, s| s), polynomial: true },
    }
}

fn wrap(e: &GenExpr, parens: bool) -> String {
    if parens {
        format!("({})", e.text)
    } else {
        e.text.clone()
    }
}

fn binary(op: char, a: GenExpr, b: GenExpr) -> GenExpr {
    let p = if op == '+' || op == '-' { 1 } else { 2 };
    let text = format!("{} {op} {}", wrap(&a, a.prec < p), wrap(&b, b.prec <= p));
    let (fa, fb) = (a.f.clone(), b.f.clone());
    let f: Rc<dyn Fn(f64, f64) -> f64> = match op {
        '+' => Rc::new(move |x, s| fa(x, s) + fb(x, s)),
        '-' => Rc::new(move |x, s| fa(x, s) - fb(x, s)),
        '*' => Rc::new(move |x, s| fa(x, s) * fb(x, s)),
        _ => Rc::new(move |x, s| fa(x, s) / fb(x, s)),
    };
    GenExpr { text, prec: p, f, polynomial: a.polynomial && b.polynomial }
}

fn call1(name: &str, a: GenExpr) -> GenExpr {
    let fa = a.f.clone();
    let f: Rc<dyn Fn(f64, f64) -> f64> = match name {
        "sin" => Rc::new(move |x, s| fa(x, s).sin()),
        "cos" => Rc::new(move |x, s| fa(x, s).cos()),
        "tanh" => Rc::new(move |x, s| fa(x, s).tanh()),
        _ => Rc::new(move |x, s| fa(x, s).abs()),
    };
    GenExpr { text: format!("{name}({})", a.text), prec: 4, f, polynomial: false }
}

pub fn gen_expr<R: Rng>(rng: &mut R, depth: u32) -> GenExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    match rng.gen_range(0..9) {
        0 => {
            let a = gen_expr(rng, depth - 1);
            let fa = a.f.clone();
            GenExpr {
                text: format!("-{}", wrap(&a, a.prec < 3)),
                prec: 3,
                f: Rc::new(move |x, s| -fa(x, s)),
                polynomial: a.polynomial,
            }
        }
        1 => binary('+', gen_expr(rng, depth - 1), gen_expr(rng, depth - 1)),
        2 => binary('-', gen_expr(rng, depth - 1), gen_expr(rng, depth - 1)),
        3 => binary('*', gen_expr(rng, depth - 1), gen_expr(rng, depth - 1)),
        4 => {
            // denominators bounded away from zero
            let inner = call1("abs", gen_expr(rng, depth - 1));
            let one = GenExpr { text: "1".into(), prec: 4, f: Rc::new(|_, _| 1.0), polynomial: true };
            let den = binary('+', one, inner);
            binary('/', gen_expr(rng, depth - 1), den)
        }
        5 => call1(["sin", "cos", "tanh", "abs"][rng.gen_range(0..4)], gen_expr(rng, depth - 1)),
        _ => {
            let name = if rng.gen_bool(0.5) { "min" } else { "max" };
            let (a, b) = (gen_expr(rng, depth - 1), gen_expr(rng, depth - 1));
            let (fa, fb) = (a.f.clone(), b.f.clone());
            let f: Rc<dyn Fn(f64, f64) -> f64> = if name == "min" {
                Rc::new(move |x, s| fa(x, s).min(fb(x, s)))
            } else {
                Rc::new(move |x, s| fa(x, s).max(fb(x, s)))
            };
            GenExpr { text: format!("{name}({}, {})", a.text, b.text), prec: 4, f, polynomial: false }
        }
    }
}

/// Smallest achievable `max_{i not in A} d_i` over all subsets `A` with weight `< eps`.
pub fn exhaustive_egoroff(dev: &[f64], grid: &MeasureGrid, eps: f64) -> f64 {
    let n = dev.len();
    assert!(n <= 16);
    let w = grid.weights();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let weight: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        if weight >= eps {
            continue;
        }
        let rest = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| dev[i])
            .fold(0.0, f64::max);
        best = best.min(rest);
    }
    best
}
