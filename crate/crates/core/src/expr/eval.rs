use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func1, Func2};

/// Division by zero at the node reached by `path` (child indices from the root).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("division by zero at node {}", NodePath(.path))]
pub struct EvalError {
    pub path: Vec<usize>,
}

struct NodePath<'a>(&'a [usize]);

impl fmt::Display for NodePath<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

/// Evaluates `ast` with `x` bound to the position and `u` bound to `s`.
pub fn eval(ast: &Expr, x: f64, s: f64) -> Result<f64, EvalError> {
    let mut path = Vec::new();
    go(ast, x, s, &mut path)
}

fn go(e: &Expr, x: f64, s: f64, path: &mut Vec<usize>) -> Result<f64, EvalError> {
    let child = |i: usize, c: &Expr, path: &mut Vec<usize>| {
        path.push(i);
        let v = go(c, x, s, path)?;
        path.pop();
        Ok(v)
    };
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::X => x,
        Expr::U => s,
        Expr::Neg(a) => -child(0, a, path)?,
        Expr::Binary(op, a, b) => {
            let a = child(0, a, path)?;
            let b = child(1, b, path)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(EvalError { path: path.clone() });
                    }
                    a / b
                }
            }
        }
        Expr::Call1(f, a) => {
            let a = child(0, a, path)?;
            match f {
                Func1::Sin => a.sin(),
                Func1::Cos => a.cos(),
                Func1::Tanh => a.tanh(),
                Func1::Abs => a.abs(),
            }
        }
        Expr::Call2(f, a, b) => {
            let a = child(0, a, path)?;
            let b = child(1, b, path)?;
            match f {
                Func2::Min => a.min(b),
                Func2::Max => a.max(b),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn ev(s: &str, x: f64, u: f64) -> Result<f64, EvalError> {
        eval(&parse(s).unwrap(), x, u)
    }

    #[test]
    fn examples() {
        assert_eq!(ev("x*u", 0.5, 0.8).unwrap(), 0.4);
        assert_eq!(ev("cos(u)", 123.0, 0.0).unwrap(), 1.0);
        assert_eq!(ev("min(u, 1-u)", 0.3, 0.7).unwrap(), 0.30000000000000004);
        assert!((ev("min(u, 1-u)", 0.3, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(ev("max(abs(-u), tanh(0))", 0.0, -2.0).unwrap(), 2.0);
    }

    #[test]
    fn division_by_zero_reports_path() {
        let err = ev("x + u / (x - x)", 1.0, 1.0).unwrap_err();
        assert_eq!(err.path, vec![1]);
        assert_eq!(err.to_string(), "division by zero at node root/1");
        let err = ev("sin(1/u)", 0.0, 0.0).unwrap_err();
        assert_eq!(err.path, vec![0]);
        assert_eq!(ev("1/u", 0.0, 4.0).unwrap(), 0.25);
    }
}
