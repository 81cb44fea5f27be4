use super::{add, mul, sub, Expr, Var};
use crate::coeff::Func;

/// A side of an angle sum that depends on `t` alone or on `s`/`y(s)` alone.
fn single_sided(e: &Expr) -> bool {
    let has_t = e.contains_var(Var::T);
    let has_inner = e.contains_var(Var::S) || e.contains_var(Var::Y);
    has_t != has_inner
}

/// Expands `sin`/`cos` of `a - b` (or `a + b`) when the two sides depend on
/// different variables, so a kernel like `cos(s - t)` separates into
/// products of single-variable factors.
pub fn rewrite_trig_difference(e: &Expr) -> Expr {
    let r = |x: &Expr| Box::new(rewrite_trig_difference(x));
    match e {
        Expr::Apply(func @ (Func::Sin | Func::Cos), arg) => {
            let arg = rewrite_trig_difference(arg);
            let split = match &arg {
                Expr::Sub(a, b) if single_sided(a) && single_sided(b) => Some((a, b, true)),
                Expr::Add(a, b) if single_sided(a) && single_sided(b) => Some((a, b, false)),
                _ => None,
            };
            let Some((a, b, minus)) = split else {
                return Expr::Apply(*func, Box::new(arg));
            };
            if a.contains_var(Var::T) == b.contains_var(Var::T) {
                return Expr::Apply(*func, Box::new(arg));
            }
            let sin = |x: &Expr| Expr::apply(Func::Sin, x.clone());
            let cos = |x: &Expr| Expr::apply(Func::Cos, x.clone());
            match (func, minus) {
                // cos(a - b) = cos a cos b + sin a sin b
                (Func::Cos, true) => add(mul(cos(a), cos(b)), mul(sin(a), sin(b))),
                (Func::Cos, false) => sub(mul(cos(a), cos(b)), mul(sin(a), sin(b))),
                // sin(a - b) = sin a cos b - cos a sin b
                (Func::Sin, true) => sub(mul(sin(a), cos(b)), mul(cos(a), sin(b))),
                _ => add(mul(sin(a), cos(b)), mul(cos(a), sin(b))),
            }
        }
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Add(a, b) => Expr::Add(r(a), r(b)),
        Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
        Expr::Mul(a, b) => Expr::Mul(r(a), r(b)),
        Expr::Div(a, b) => Expr::Div(r(a), r(b)),
        Expr::Neg(a) => Expr::Neg(r(a)),
        Expr::Pow(a, n) => Expr::Pow(r(a), *n),
        Expr::Apply(func, a) => Expr::Apply(*func, r(a)),
        Expr::Integral { integrand, lower } => Expr::Integral {
            integrand: r(integrand),
            lower: lower.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;
    use crate::expr::{eval_numeric, parse_expr, Bindings};
    use proptest::prelude::*;

    fn rw(text: &str) -> String {
        rewrite_trig_difference(&parse_expr(text).unwrap()).to_string()
    }

    #[test]
    fn expands_mixed_differences() {
        assert_eq!(rw("cos(s-t)"), "cos(s)*cos(t)+sin(s)*sin(t)");
        assert_eq!(rw("sin(t-s)"), "sin(t)*cos(s)-cos(t)*sin(s)");
        assert_eq!(rw("cos(t)"), "cos(t)");
        assert_eq!(rw("cos(t-1)"), "cos(t-1)");
        assert_eq!(rw("3*y(s)^2*cos(s-t)"), "3*y(s)^2*(cos(s)*cos(t)+sin(s)*sin(t))");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rewrite_preserves_value(t in -2.0f64..2.0, s in -2.0f64..2.0) {
            let digits = 40;
            for text in ["cos(s-t)", "sin(t-s)", "cos(t+2*s)", "sin(s+t^2)*y(s)"] {
                let e = parse_expr(text).unwrap();
                let r = rewrite_trig_difference(&e);
                let b = Bindings::at_t(Coefficient::from(num_rational::BigRational::from_float(t).unwrap()))
                    .with_s(Coefficient::from(num_rational::BigRational::from_float(s).unwrap()))
                    .with_y(Coefficient::ratio(3, 7));
                let x = eval_numeric(&e, &b, digits).unwrap();
                let y = eval_numeric(&r, &b, digits).unwrap();
                let diff = (&x - &y).abs().to_f64();
                prop_assert!(diff <= 1e-39 * x.abs().to_f64().max(1.0), "{} {}", text, diff);
            }
        }
    }
}
