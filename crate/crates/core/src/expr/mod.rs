//! Expression trees for equations and closed-form references.

mod diff;
mod eval;
mod parser;
mod rewrite;
mod split;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::Func;

pub use diff::{differentiate_sym, DiffError};
pub use eval::{eval, eval_numeric, Bindings, EvalError};
pub use parser::{parse, parse_document, parse_expr, Header, ParseError, VieDocument};
pub use rewrite::rewrite_trig_difference;
pub use split::{split_kernel, Equation, KernelTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    S,
    /// The unknown, `y(s)` inside an integrand or `y(t)` in an auxiliary definition.
    Y,
    /// `y'`, only produced by symbolic differentiation.
    DY,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(BigRational),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Integer power, exponent at least 1.
    Pow(Box<Expr>, u32),
    Apply(Func, Box<Expr>),
    /// `int(integrand, s=lower..t)`.
    Integral {
        integrand: Box<Expr>,
        lower: BigRational,
    },
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Const(BigRational::new(n.into(), d.into()))
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    pub fn s() -> Expr {
        Expr::Var(Var::S)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn apply(func: Func, arg: Expr) -> Expr {
        Expr::Apply(func, Box::new(arg))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            Expr::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_const_value(&self, v: i64) -> bool {
        matches!(self, Expr::Const(q) if *q == BigRational::from_integer(v.into()))
    }

    /// Whether any node satisfies `pred`.
    pub fn any(&self, pred: &impl Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.any(pred) || b.any(pred),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Apply(_, a) => a.any(pred),
            Expr::Integral { integrand, .. } => integrand.any(pred),
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.any(&|e| matches!(e, Expr::Var(x) if *x == v))
    }

    pub fn contains_integral(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Integral { .. }))
    }

    pub fn integral_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.integral_count() + b.integral_count()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Apply(_, a) => a.integral_count(),
            Expr::Integral { integrand, .. } => 1 + integrand.integral_count(),
        }
    }

    /// No variables at all.
    pub fn is_constant(&self) -> bool {
        !self.any(&|e| matches!(e, Expr::Var(_) | Expr::Integral { .. }))
    }

    /// Replaces every occurrence of `from` with `to`.
    pub fn rename(&self, from: Var, to: Var) -> Expr {
        self.map_vars(&|v| if v == from { Expr::Var(to) } else { Expr::Var(v) })
    }

    pub fn map_vars(&self, f: &impl Fn(Var) -> Expr) -> Expr {
        let m = |e: &Expr| Box::new(e.map_vars(f));
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => f(*v),
            Expr::Add(a, b) => Expr::Add(m(a), m(b)),
            Expr::Sub(a, b) => Expr::Sub(m(a), m(b)),
            Expr::Mul(a, b) => Expr::Mul(m(a), m(b)),
            Expr::Div(a, b) => Expr::Div(m(a), m(b)),
            Expr::Neg(a) => Expr::Neg(m(a)),
            Expr::Pow(a, n) => Expr::Pow(m(a), *n),
            Expr::Apply(func, a) => Expr::Apply(*func, m(a)),
            Expr::Integral { integrand, lower } => Expr::Integral {
                integrand: m(integrand),
                lower: lower.clone(),
            },
        }
    }

    /// Renders with `y` for the unknown, as used for functions of `t`.
    pub fn display_in_t(&self) -> impl fmt::Display + '_ {
        Styled { expr: self, y: "y" }
    }
}

// Smart constructors with light constant folding. The parser builds raw nodes;
// everything derived (derivatives, rewrites, kernel splitting) goes through these.

pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(x), _) if x.is_zero() => b,
        (_, Expr::Const(y)) if y.is_zero() => a,
        (_, Expr::Const(y)) if y.is_negative() => Expr::Sub(Box::new(a), Box::new(Expr::Const(-y))),
        (_, Expr::Neg(inner)) => Expr::Sub(Box::new(a), inner.clone()),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (_, Expr::Const(y)) if y.is_zero() => a,
        (Expr::Const(x), _) if x.is_zero() => neg(b),
        (_, Expr::Neg(inner)) => add(a, (**inner).clone()),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(x), _) | (_, Expr::Const(x)) if x.is_zero() => Expr::int(0),
        (Expr::Const(x), _) if x.is_one() => b,
        (_, Expr::Const(y)) if y.is_one() => a,
        (Expr::Const(x), _) if (-x).is_one() => neg(b),
        (_, Expr::Const(y)) if (-y).is_one() => neg(a),
        (Expr::Neg(x), Expr::Neg(y)) => mul((**x).clone(), (**y).clone()),
        (Expr::Neg(x), _) => neg(mul((**x).clone(), b)),
        (_, Expr::Neg(y)) => neg(mul(a, (**y).clone())),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
        (Expr::Const(x), _) if x.is_zero() => Expr::int(0),
        (_, Expr::Const(y)) if y.is_one() => a,
        (Expr::Neg(x), _) => neg(div((**x).clone(), b)),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => Expr::Const(-x),
        Expr::Neg(inner) => *inner,
        Expr::Sub(x, y) => Expr::Sub(y, x),
        other => Expr::Neg(Box::new(other)),
    }
}

pub fn pow(a: Expr, n: u32) -> Expr {
    match (&a, n) {
        (_, 0) => Expr::int(1),
        (_, 1) => a,
        (Expr::Const(x), _) => Expr::Const(num_traits::pow(x.clone(), n as usize)),
        _ => Expr::Pow(Box::new(a), n),
    }
}

// Printing. Precedence: sums 1, products 2, unary minus 3, powers 4, atoms 5.

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(q) if q.is_negative() => 3,
        Expr::Const(q) if !is_terminating(q) => 2,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn is_terminating(q: &BigRational) -> bool {
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

fn write_const(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.denom().is_one() {
        return write!(f, "{}", q.numer());
    }
    if !is_terminating(q) {
        return write!(f, "{}/{}", q.numer(), q.denom());
    }
    let mut places = 0usize;
    let mut scaled = q.clone();
    while !scaled.denom().is_one() {
        scaled *= BigRational::from_integer(10.into());
        places += 1;
    }
    let n = scaled.numer().abs().to_string();
    let n = format!("{n:0>width$}", width = places + 1);
    let (int_part, frac) = n.split_at(n.len() - places);
    let sign = if q.is_negative() { "-" } else { "" };
    write!(f, "{sign}{int_part}.{frac}")
}

struct Styled<'a> {
    expr: &'a Expr,
    y: &'a str,
}

impl Styled<'_> {
    fn child<'b>(&'b self, e: &'b Expr) -> Styled<'b> {
        Styled { expr: e, y: self.y }
    }

    fn wrap(&self, f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(e))
        } else {
            write!(f, "{}", self.child(e))
        }
    }
}

impl fmt::Display for Styled<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.expr;
        match e {
            Expr::Const(q) => write_const(f, q),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::S) => f.write_str("s"),
            Expr::Var(Var::Y) => f.write_str(self.y),
            Expr::Var(Var::DY) => f.write_str("y'"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(e, Expr::Add(..)) { '+' } else { '-' };
                self.wrap(f, a, precedence(a) < 1)?;
                write!(f, "{op}")?;
                self.wrap(f, b, precedence(b) <= 1)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(e, Expr::Mul(..)) { '*' } else { '/' };
                self.wrap(f, a, precedence(a) < 2)?;
                write!(f, "{op}")?;
                self.wrap(f, b, precedence(b) <= 2)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                self.wrap(f, a, precedence(a) < 3)
            }
            Expr::Pow(a, n) => {
                self.wrap(f, a, precedence(a) < 5)?;
                write!(f, "^{n}")
            }
            Expr::Apply(func, a) => write!(f, "{func}({})", self.child(a)),
            Expr::Integral { integrand, lower } => {
                write!(f, "int({},s=", self.child(integrand))?;
                write_const(f, lower)?;
                f.write_str("..t)")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Styled { expr: self, y: "y(s)" }.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_uses_minimal_parentheses() {
        let e = Expr::Mul(
            Box::new(Expr::Add(
                Box::new(Expr::int(2)),
                Box::new(Expr::apply(Func::Cos, Expr::t())),
            )),
            Box::new(Expr::y()),
        );
        assert_eq!(e.to_string(), "(2+cos(t))*y(s)");
        assert_eq!(e.display_in_t().to_string(), "(2+cos(t))*y");
        let s = Expr::Sub(
            Box::new(Expr::t()),
            Box::new(Expr::Sub(Box::new(Expr::s()), Box::new(Expr::int(1)))),
        );
        assert_eq!(s.to_string(), "t-(s-1)");
        assert_eq!(Expr::Pow(Box::new(Expr::int(-3)), 2).to_string(), "(-3)^2");
        assert_eq!(Expr::ratio(1, 4).to_string(), "0.25");
        assert_eq!(Expr::ratio(-3, 2).to_string(), "-1.5");
        assert_eq!(Expr::ratio(1, 3).to_string(), "1/3");
        assert_eq!(Expr::ratio(1, 40).to_string(), "0.025");
    }

    #[test]
    fn smart_constructors_fold() {
        assert_eq!(add(Expr::int(0), Expr::t()), Expr::t());
        assert_eq!(mul(Expr::int(1), Expr::t()), Expr::t());
        assert_eq!(mul(Expr::int(-1), Expr::t()), Expr::Neg(Box::new(Expr::t())));
        assert_eq!(mul(Expr::int(0), Expr::t()), Expr::int(0));
        assert_eq!(neg(neg(Expr::t())), Expr::t());
        assert_eq!(add(Expr::int(2), Expr::int(3)), Expr::int(5));
        assert_eq!(pow(Expr::t(), 1), Expr::t());
        assert_eq!(sub(Expr::t(), neg(Expr::s())).to_string(), "t+s");
    }

    #[test]
    fn variable_queries() {
        let e = Expr::apply(Func::Sin, Expr::y());
        assert!(e.contains_var(Var::Y));
        assert!(!e.contains_var(Var::T));
        assert_eq!(e.rename(Var::Y, Var::T), Expr::apply(Func::Sin, Expr::t()));
        assert!(Expr::apply(Func::Sin, Expr::int(1)).is_constant());
    }
}
