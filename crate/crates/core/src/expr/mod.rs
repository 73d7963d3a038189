//! Pointwise operator expressions `phi(x, u)`.
//!
//! Grammar (whitespace insignificant, standard precedence, left associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary
//! primary := number | 'x' | 'u' | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin`, `cos`, `tanh`, `abs` (unary) and `min`, `max` (binary).
//! [`Expr`]'s `Display` prints the canonical form with the fewest
//! parentheses that re-parses to the same tree.

mod eval;
mod lipschitz;
mod parser;

use std::fmt;

use crate::operators::PointwiseOperator;

pub use eval::{eval, EvalError};
pub use lipschitz::{lipschitz_bound, lipschitz_bound_in_u, Interval};
pub use parser::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func1 {
    Sin,
    Cos,
    Tanh,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func2 {
    Min,
    Max,
}

impl Func1 {
    pub fn name(self) -> &'static str {
        match self {
            Func1::Sin => "sin",
            Func1::Cos => "cos",
            Func1::Tanh => "tanh",
            Func1::Abs => "abs",
        }
    }
}

impl Func2 {
    pub fn name(self) -> &'static str {
        match self {
            Func2::Min => "min",
            Func2::Max => "max",
        }
    }
}

/// Syntax tree of an operator rule. Arity is fixed by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The position `x`.
    X,
    /// The function value `u(x)`.
    U,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call1(Func1, Box<Expr>),
    Call2(Func2, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call1(f: Func1, arg: Expr) -> Self {
        Expr::Call1(f, Box::new(arg))
    }

    pub fn call2(f: Func2, a: Expr, b: Expr) -> Self {
        Expr::Call2(f, Box::new(a), Box::new(b))
    }

    /// Whether the tree references `u`.
    pub fn uses_u(&self) -> bool {
        match self {
            Expr::U => true,
            Expr::Num(_) | Expr::X => false,
            Expr::Neg(a) | Expr::Call1(_, a) => a.uses_u(),
            Expr::Binary(_, a, b) | Expr::Call2(_, a, b) => a.uses_u() || b.uses_u(),
        }
    }

    /// Evaluates at `(x, s)`; see [`eval`].
    pub fn eval(&self, x: f64, s: f64) -> Result<f64, EvalError> {
        eval(self, x, s)
    }

    /// Wraps the tree as a [`PointwiseOperator`]. Evaluation errors surface
    /// as non-finite values, which `apply` reports with the offending atom.
    pub fn to_operator(&self) -> PointwiseOperator {
        let ast = self.clone();
        PointwiseOperator::new(self.to_string(), move |x, s| {
            eval(&ast, x, s).unwrap_or(f64::NAN)
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::U => f.write_str("u"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                write_child(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, b, b.precedence() <= p)
            }
            Expr::Call1(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Call2(func, a, b) => write!(f, "{}({a}, {b})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(p("x*u").to_string(), "x * u");
        assert_eq!(p("(x*u)").to_string(), "x * u");
        assert_eq!(p("x - (u - 1)").to_string(), "x - (u - 1)");
        assert_eq!(p("(x - u) - 1").to_string(), "x - u - 1");
        assert_eq!(p("-(x + u)").to_string(), "-(x + u)");
        assert_eq!(p("- - u").to_string(), "--u");
        assert_eq!(p("x / (2 * u)").to_string(), "x / (2 * u)");
        assert_eq!(p("min(u,1-u)").to_string(), "min(u, 1 - u)");
        assert_eq!(p("0.5*u + 0.25*sin(u)").to_string(), "0.5 * u + 0.25 * sin(u)");
    }

    #[test]
    fn printing_reparses() {
        for s in ["-x * -u", "x * -(u + 1)", "abs(-u) / (1 + x)", "1 - -u", "--(x)"] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s}");
        }
    }

    #[test]
    fn uses_u_detection() {
        assert!(p("x*u").uses_u());
        assert!(!p("1 - x").uses_u());
    }

    #[test]
    fn operator_from_expr() {
        let op = p("x*u").to_operator();
        assert_eq!(op.eval(0.5, 0.8), 0.4);
        assert_eq!(op.description(), "x * u");
        assert!(p("u / x").to_operator().eval(0.0, 1.0).is_nan());
    }
}
