//! Interval bounds on `|d phi / d u|` over a box of `(x, u)` values.
//!
//! Each node carries an enclosure of its value and of its partial derivative
//! in `u`. The bound is `unknown` (`None`) when a division's denominator
//! range contains zero or an enclosure stops being finite.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{BinOp, Expr, Func1, Func2};
use crate::grid::MeasureGrid;
use crate::operators::BoxSet;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `max |v|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.lo - o.hi, self.hi - o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Self::new(
            p.iter().copied().fold(f64::INFINITY, f64::min),
            p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    fn div(self, o: Self) -> Option<Self> {
        if o.contains(0.0) {
            return None;
        }
        Some(self.mul(Self::new(1.0 / o.hi, 1.0 / o.lo)))
    }

    fn sin(self) -> Self {
        if self.hi - self.lo >= 2.0 * PI {
            return Self::new(-1.0, 1.0);
        }
        let (a, b) = (self.lo.sin(), self.hi.sin());
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        // peaks at pi/2 + 2k pi, troughs at -pi/2 + 2k pi
        if hits(self, FRAC_PI_2) {
            hi = 1.0;
        }
        if hits(self, -FRAC_PI_2) {
            lo = -1.0;
        }
        Self::new(lo, hi)
    }

    fn cos(self) -> Self {
        if self.hi - self.lo >= 2.0 * PI {
            return Self::new(-1.0, 1.0);
        }
        let (a, b) = (self.lo.cos(), self.hi.cos());
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        if hits(self, 0.0) {
            hi = 1.0;
        }
        if hits(self, PI) {
            lo = -1.0;
        }
        Self::new(lo, hi)
    }

    fn tanh(self) -> Self {
        Self::new(self.lo.tanh(), self.hi.tanh())
    }

    /// Range of `1 - tanh(t)^2`, which decreases in `|t|`.
    fn sech2(self) -> Self {
        let f = |t: f64| 1.0 - t.tanh().powi(2);
        if self.contains(0.0) {
            Self::new(f(self.lo).min(f(self.hi)), 1.0)
        } else if self.lo > 0.0 {
            Self::new(f(self.hi), f(self.lo))
        } else {
            Self::new(f(self.lo), f(self.hi))
        }
    }

    fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Self::new(0.0, self.mag())
        }
    }
}

/// Whether `phase + 2k pi` lies in the interval for some integer `k`.
fn hits(iv: Interval, phase: f64) -> bool {
    let k = ((iv.lo - phase) / (2.0 * PI)).ceil();
    phase + 2.0 * PI * k <= iv.hi
}

/// Value and `d/du` enclosures of a node.
#[derive(Debug, Clone, Copy)]
struct Enclosure {
    value: Interval,
    du: Interval,
}

fn enclose(e: &Expr, x: Interval, s: Interval) -> Option<Enclosure> {
    let zero = Interval::point(0.0);
    let out = match e {
        Expr::Num(v) => Enclosure {
            value: Interval::point(*v),
            du: zero,
        },
        Expr::X => Enclosure { value: x, du: zero },
        Expr::U => Enclosure {
            value: s,
            du: Interval::point(1.0),
        },
        Expr::Neg(a) => {
            let a = enclose(a, x, s)?;
            Enclosure {
                value: a.value.neg(),
                du: a.du.neg(),
            }
        }
        Expr::Binary(op, a, b) => {
            let a = enclose(a, x, s)?;
            let b = enclose(b, x, s)?;
            match op {
                BinOp::Add => Enclosure {
                    value: a.value.add(b.value),
                    du: a.du.add(b.du),
                },
                BinOp::Sub => Enclosure {
                    value: a.value.sub(b.value),
                    du: a.du.sub(b.du),
                },
                BinOp::Mul => Enclosure {
                    value: a.value.mul(b.value),
                    du: a.du.mul(b.value).add(a.value.mul(b.du)),
                },
                BinOp::Div => {
                    let du = if b.du == zero {
                        a.du.div(b.value)?
                    } else {
                        let num = a.du.mul(b.value).sub(a.value.mul(b.du));
                        num.div(b.value.mul(b.value))?
                    };
                    Enclosure {
                        value: a.value.div(b.value)?,
                        du,
                    }
                }
            }
        }
        Expr::Call1(f, a) => {
            let a = enclose(a, x, s)?;
            let (value, slope) = match f {
                Func1::Sin => (a.value.sin(), a.value.cos()),
                Func1::Cos => (a.value.cos(), a.value.sin().neg()),
                Func1::Tanh => (a.value.tanh(), a.value.sech2()),
                Func1::Abs => {
                    let sign = if a.value.lo >= 0.0 {
                        Interval::point(1.0)
                    } else if a.value.hi <= 0.0 {
                        Interval::point(-1.0)
                    } else {
                        Interval::new(-1.0, 1.0)
                    };
                    (a.value.abs(), sign)
                }
            };
            Enclosure {
                value,
                du: slope.mul(a.du),
            }
        }
        Expr::Call2(f, a, b) => {
            let a = enclose(a, x, s)?;
            let b = enclose(b, x, s)?;
            let value = match f {
                Func2::Min => Interval::new(a.value.lo.min(b.value.lo), a.value.hi.min(b.value.hi)),
                Func2::Max => Interval::new(a.value.lo.max(b.value.lo), a.value.hi.max(b.value.hi)),
            };
            // whichever branch can be active contributes its slope
            let (a_only, b_only) = match f {
                Func2::Min => (a.value.hi < b.value.lo, b.value.hi < a.value.lo),
                Func2::Max => (a.value.lo > b.value.hi, b.value.lo > a.value.hi),
            };
            let du = if a_only {
                a.du
            } else if b_only {
                b.du
            } else {
                a.du.hull(&b.du)
            };
            Enclosure { value, du }
        }
    };
    (out.value.is_finite() && out.du.is_finite()).then_some(out)
}

/// Upper bound on `|d phi / d u|` for `x` in `x_range`, `u` in `s_range`.
pub fn lipschitz_bound(ast: &Expr, x_range: Interval, s_range: Interval) -> Option<f64> {
    enclose(ast, x_range, s_range).map(|e| e.du.mag())
}

/// [`lipschitz_bound`] over the grid's hull and the value range of `set`.
pub fn lipschitz_bound_in_u(ast: &Expr, set: &BoxSet, grid: &MeasureGrid) -> Option<f64> {
    let (a, b) = grid.hull();
    let lo = set.lower().values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = set.upper().values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lipschitz_bound(ast, Interval::new(a, b), Interval::new(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn bound(s: &str, x: (f64, f64), u: (f64, f64)) -> Option<f64> {
        lipschitz_bound(&parse(s).unwrap(), Interval::new(x.0, x.1), Interval::new(u.0, u.1))
    }

    #[test]
    fn scenario_bounds() {
        assert_eq!(bound("x*u", (0.0, 1.0), (0.0, 1.0)), Some(1.0));
        assert_eq!(bound("u", (0.0, 1.0), (-1.0, 1.0)), Some(1.0));
        assert_eq!(bound("2*u", (0.0, 1.0), (-1.0, 1.0)), Some(2.0));
        assert_eq!(bound("sin(u)", (0.0, 1.0), (-5.0, 5.0)), Some(1.0));
        assert_eq!(bound("tanh(u)", (0.0, 1.0), (-5.0, 5.0)), Some(1.0));
        assert_eq!(bound("abs(u) - x", (0.0, 1.0), (-5.0, 5.0)), Some(1.0));
        assert_eq!(bound("min(u, 1 - u)", (0.0, 1.0), (0.0, 1.0)), Some(1.0));
        assert_eq!(bound("0.5*u + 0.25*sin(u)", (0.0, 1.0), (-1.0, 1.0)), Some(0.75));
    }

    #[test]
    fn cos_bound_is_sin_of_radius() {
        let b = bound("cos(u)", (0.0, 1.0), (-1.0, 1.0)).unwrap();
        assert!((b - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn division() {
        assert_eq!(bound("u / x", (-1.0, 1.0), (0.0, 1.0)), None);
        assert_eq!(bound("u / (1 + x)", (0.0, 1.0), (0.0, 1.0)), Some(1.0));
        assert_eq!(bound("1 / u", (0.0, 1.0), (-1.0, 1.0)), None);
    }

    #[test]
    fn bound_dominates_sampled_slopes() {
        let exprs = ["x*u*u", "sin(x*u) + cos(u)", "tanh(2*u - x)", "max(u*u, x) / (2 + x)"];
        for s in exprs {
            let ast = parse(s).unwrap();
            let b = lipschitz_bound(&ast, Interval::new(0.0, 1.0), Interval::new(-1.0, 1.0)).unwrap();
            for i in 0..50 {
                let x = i as f64 / 49.0;
                for j in 0..50 {
                    let u = -1.0 + 2.0 * j as f64 / 50.0;
                    let h = 1e-6;
                    let slope = (ast.eval(x, u + h).unwrap() - ast.eval(x, u).unwrap()) / h;
                    assert!(slope.abs() <= b + 1e-5, "{s}: slope {slope} > {b}");
                }
            }
        }
    }

    #[test]
    fn trig_ranges() {
        let r = Interval::new(0.0, PI).sin();
        assert_eq!(r.hi, 1.0);
        assert!(r.lo.abs() < 1e-15);
        let r = Interval::new(-0.5, 0.5).cos();
        assert_eq!(r.hi, 1.0);
        let r = Interval::new(3.0, 3.5).cos();
        assert_eq!(r.lo, -1.0);
    }
}
