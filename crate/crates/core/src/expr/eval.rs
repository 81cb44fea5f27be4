use thiserror::Error;

use super::{Expr, Var};
use crate::coeff::{CoeffError, Coefficient};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0:?}` is not bound")]
    Unbound(Var),
    #[error("cannot evaluate an integral node numerically")]
    Integral,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Values for the free variables of an expression.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub t: Option<Coefficient>,
    pub s: Option<Coefficient>,
    pub y: Option<Coefficient>,
    pub dy: Option<Coefficient>,
}

impl Bindings {
    pub fn at_t(t: Coefficient) -> Self {
        Bindings {
            t: Some(t),
            ..Default::default()
        }
    }

    pub fn with_y(mut self, y: Coefficient) -> Self {
        self.y = Some(y);
        self
    }

    pub fn with_s(mut self, s: Coefficient) -> Self {
        self.s = Some(s);
        self
    }

    fn get(&self, v: Var) -> Result<&Coefficient, EvalError> {
        let slot = match v {
            Var::T => &self.t,
            Var::S => &self.s,
            Var::Y => &self.y,
            Var::DY => &self.dy,
        };
        slot.as_ref().ok_or(EvalError::Unbound(v))
    }
}

/// Evaluates `e`, staying exact while every intermediate is rational and
/// switching to floats at `digits` as soon as a float (or an irrational
/// transcendental value) appears.
pub fn eval(e: &Expr, b: &Bindings, digits: u32) -> Result<Coefficient, EvalError> {
    let bin = |x: &Expr,
               y: &Expr,
               op: fn(&Coefficient, &Coefficient) -> Result<Coefficient, CoeffError>|
     -> Result<Coefficient, EvalError> {
        let l = eval(x, b, digits)?;
        let r = eval(y, b, digits)?;
        let (l, r) = l.unify(&r, digits)?;
        Ok(op(&l, &r)?)
    };
    match e {
        Expr::Const(q) => Ok(Coefficient::Rational(q.clone())),
        Expr::Var(v) => Ok(b.get(*v)?.clone()),
        Expr::Add(x, y) => bin(x, y, Coefficient::try_add),
        Expr::Sub(x, y) => bin(x, y, Coefficient::try_sub),
        Expr::Mul(x, y) => bin(x, y, Coefficient::try_mul),
        Expr::Div(x, y) => bin(x, y, Coefficient::try_div),
        Expr::Neg(x) => Ok(-eval(x, b, digits)?),
        Expr::Pow(x, n) => Ok(eval(x, b, digits)?.pow(*n)),
        Expr::Apply(func, x) => Ok(eval(x, b, digits)?.apply(*func, digits)?),
        Expr::Integral { .. } => Err(EvalError::Integral),
    }
}

/// Float evaluation at `digits` decimal digits.
pub fn eval_numeric(e: &Expr, b: &Bindings, digits: u32) -> Result<Coefficient, EvalError> {
    Ok(eval(e, b, digits)?.promote(digits)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    const EX1_EXACT: &str = "exp(t)*sin(t) + exp(t)*(2+cos(t))*(ln(3) - ln(2+cos(t)))";
    const EX4_EXACT: &str = "2*arccot(cot(0.5)*exp(t))";

    #[test]
    fn closed_forms_at_zero() {
        let e = parse_expr(EX1_EXACT).unwrap();
        let v = eval_numeric(&e, &Bindings::at_t(Coefficient::from(0)), 40).unwrap();
        assert!(v.abs().to_f64() < 1e-38);
        let e = parse_expr(EX4_EXACT).unwrap();
        let v = eval_numeric(&e, &Bindings::at_t(Coefficient::from(0)), 40).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-15);
        assert_eq!(v.round_to_places(36), format!("1.{}", "0".repeat(36)));
    }

    #[test]
    fn exact_when_possible() {
        let e = parse_expr("cos(t) + 2*sin(t)/3").unwrap();
        let v = eval(&e, &Bindings::at_t(Coefficient::from(0)), 40).unwrap();
        assert_eq!(v, Coefficient::from(1));
    }

    #[test]
    fn closed_form_at_one() {
        // e*sin 1 + e*(2 + cos 1)*(ln 3 - ln(2 + cos 1)), checked against f64 libm
        let e = parse_expr(EX1_EXACT).unwrap();
        let v = eval_numeric(&e, &Bindings::at_t(Coefficient::from(1)), 32).unwrap();
        let x = 1.0f64;
        let f = x.exp() * x.sin() + x.exp() * (2.0 + x.cos()) * (3f64.ln() - (2.0 + x.cos()).ln());
        assert!((v.to_f64() - f).abs() < 1e-13);
    }

    #[test]
    fn errors() {
        let e = parse_expr("ln(t)").unwrap();
        assert!(matches!(
            eval(&e, &Bindings::at_t(Coefficient::from(0)), 40),
            Err(EvalError::Coeff(CoeffError::Domain { .. }))
        ));
        let e = parse_expr("1/(t-1)").unwrap();
        assert!(matches!(
            eval(&e, &Bindings::at_t(Coefficient::from(1)), 40),
            Err(EvalError::Coeff(CoeffError::DivisionByZero))
        ));
        assert_eq!(
            eval(&Expr::s(), &Bindings::default(), 40),
            Err(EvalError::Unbound(Var::S))
        );
    }
}
