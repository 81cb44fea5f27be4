use thiserror::Error;

use super::{add, div, mul, neg, pow, sub, Expr, Var};
use crate::coeff::Func;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("cannot differentiate `{0}`")]
    Unsupported(String),
}

/// Derivative of `e` with respect to `var`.
///
/// For `var = T` (or `S`) the unknown is treated as a function of that
/// variable: `d/dt y = y'`. For `var = Y` it is a partial derivative.
pub fn differentiate_sym(e: &Expr, var: Var) -> Result<Expr, DiffError> {
    let d = |x: &Expr| differentiate_sym(x, var);
    Ok(match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var(v) if *v == var => Expr::int(1),
        Expr::Var(Var::Y) if matches!(var, Var::T | Var::S) => Expr::Var(Var::DY),
        Expr::Var(Var::DY) if matches!(var, Var::T | Var::S) => return Err(DiffError::Unsupported(e.to_string())),
        Expr::Var(_) => Expr::int(0),
        Expr::Add(a, b) => add(d(a)?, d(b)?),
        Expr::Sub(a, b) => sub(d(a)?, d(b)?),
        Expr::Neg(a) => neg(d(a)?),
        Expr::Mul(a, b) => add(mul(d(a)?, (**b).clone()), mul((**a).clone(), d(b)?)),
        Expr::Div(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let da = d(&a)?;
            let db = d(&b)?;
            if a.is_const_value(1) {
                // d(1/u) = -u'/u^2
                neg(div(db, pow(b, 2)))
            } else {
                div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2))
            }
        }
        Expr::Pow(a, n) => {
            let u = (**a).clone();
            mul(mul(Expr::int(i64::from(*n)), pow(u, n - 1)), d(a)?)
        }
        Expr::Apply(func, a) => {
            let u = (**a).clone();
            let du = d(a)?;
            let outer = match func {
                Func::Sin => Expr::apply(Func::Cos, u),
                Func::Cos => neg(Expr::apply(Func::Sin, u)),
                Func::Exp => e.clone(),
                Func::Ln => return Ok(div(du, u)),
                Func::Tan => add(Expr::int(1), pow(e.clone(), 2)),
                Func::Cot => neg(add(Expr::int(1), pow(e.clone(), 2))),
                Func::Arccot => return Ok(neg(div(du, add(Expr::int(1), pow(u, 2))))),
            };
            mul(outer, du)
        }
        Expr::Integral { .. } => return Err(DiffError::Unsupported(e.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;
    use crate::expr::{eval_numeric, parse_expr, Bindings};
    use proptest::prelude::*;

    #[test]
    fn chain_rule_on_sin_y() {
        let e = Expr::apply(Func::Sin, Expr::y());
        let d = differentiate_sym(&e, Var::T).unwrap();
        assert_eq!(
            d,
            Expr::Mul(
                Box::new(Expr::apply(Func::Cos, Expr::y())),
                Box::new(Expr::Var(Var::DY))
            )
        );
        assert_eq!(d.display_in_t().to_string(), "cos(y)*y'");
    }

    #[test]
    fn shifted_cosine() {
        let e = parse_expr("2+cos(t)").unwrap();
        assert_eq!(differentiate_sym(&e, Var::T).unwrap().to_string(), "-sin(t)");
    }

    #[test]
    fn reciprocal_rule() {
        let e = parse_expr("1/(2+cos(t))").unwrap();
        let d = differentiate_sym(&e, Var::T).unwrap();
        assert_eq!(d.to_string(), "sin(t)/(2+cos(t))^2");
        let v = eval_numeric(&d, &Bindings::at_t(Coefficient::ratio(1, 3)), 32).unwrap();
        let x = 1.0f64 / 3.0;
        assert!((v.to_f64() - x.sin() / (2.0 + x.cos()).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn partial_in_y() {
        let e = parse_expr("3/2*y(s)^2*cos(s)").unwrap();
        let d = differentiate_sym(&e, Var::Y).unwrap();
        let v = eval_numeric(
            &d,
            &Bindings::default()
                .with_s(Coefficient::from(0))
                .with_y(Coefficient::from(2)),
            32,
        )
        .unwrap();
        assert_eq!(v.round_to_places(20), format!("6.{}", "0".repeat(20)));
    }

    #[test]
    fn integrals_are_rejected() {
        let e = parse_expr("1").unwrap();
        let i = Expr::Integral {
            integrand: Box::new(e),
            lower: num_rational::BigRational::from_integer(0.into()),
        };
        assert!(differentiate_sym(&i, Var::T).is_err());
    }

    fn fd_check(text: &str, x: f64) {
        let digits = 32;
        let e = parse_expr(text).unwrap();
        let d = differentiate_sym(&e, Var::T).unwrap();
        let xq = Coefficient::from(num_rational::BigRational::from_float(x).unwrap());
        let h = Coefficient::ratio(1, 10_000_000_000);
        let at = |p: &Coefficient| eval_numeric(&e, &Bindings::at_t(p.clone()), digits).unwrap();
        let hi = at(&(&xq + &h));
        let lo = at(&(&xq - &h));
        let two_h = (&h + &h).promote(digits).unwrap();
        let fd = &(&hi - &lo) / &two_h;
        let exact = eval_numeric(&d, &Bindings::at_t(xq), digits).unwrap();
        let err = (&fd - &exact).abs().to_f64();
        let scale = exact.abs().to_f64().max(1e-300);
        assert!(err / scale <= 1e-8, "{text} at {x}: relative error {}", err / scale);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn derivative_matches_central_difference(x in 0.05f64..1.4) {
            for text in ["sin(t)", "cos(t)", "exp(t)", "ln(t)", "tan(t)", "arccot(t)", "cot(t)", "1/(2+cos(t))", "t^5", "sin(t^2)*exp(-t)"] {
                fd_check(text, x);
            }
        }
    }
}
