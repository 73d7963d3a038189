//! Parsing, pretty-printing, evaluating and bounding operator expressions.

use fixpoint::expr::{lipschitz_bound, Interval};
use fixpoint::prelude::*;

fn main() {
    for text in ["x*u", "0.5*u + 0.25*sin(u)", "(x * (u))", "min(u, 1 - u) / (2 + x)", "cos(u)"] {
        let ast = parse(text).expect("well-formed");
        let bound = lipschitz_bound(&ast, Interval::new(0.0, 1.0), Interval::new(-1.0, 1.0));
        println!(
            "{text:28} -> {ast:28} value at (0.5, 0.8) = {:<8.5} |d/du| <= {bound:?}",
            ast.eval(0.5, 0.8).unwrap()
        );
    }
    for bad in ["x*(u", "x $ u", "1 + foo(u)", "min(u)", "u / (x - x)"] {
        match parse(bad) {
            Err(e) => println!("{bad:12} parse error: {e}"),
            Ok(ast) => println!("{bad:12} eval error: {}", ast.eval(0.3, 1.0).unwrap_err()),
        }
    }
}
