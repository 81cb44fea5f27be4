use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::parser::ParseError;
use super::{add, div, mul, neg, rewrite_trig_difference, sub, Expr, Var};

/// One separable piece `f(t) * int(kernel(s, y(s)), s=a..t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelTerm {
    pub f: Expr,
    /// In terms of `s` and `y(s)`; never contains `t`.
    pub kernel: Expr,
}

/// `y(t) = phi(t) + sum_i f_i(t) * int(k_i(s, y(s)), s=lower..t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub label: String,
    pub rhs: Expr,
    pub phi: Expr,
    pub terms: Vec<KernelTerm>,
    pub lower: BigRational,
}

impl Equation {
    /// Left endpoint of the integral, the expansion point of every series.
    pub fn point(&self) -> &BigRational {
        &self.lower
    }

    pub fn has_integral(&self) -> bool {
        !self.terms.is_empty()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y(t) = {}", self.phi)?;
        for term in &self.terms {
            let integral = Expr::Integral {
                integrand: Box::new(term.kernel.clone()),
                lower: self.lower.clone(),
            };
            write!(f, " + {}", mul(term.f.clone(), integral))?;
        }
        Ok(())
    }
}

/// Splits a right-hand side with at most one integral into separable
/// `phi + sum f_i * int(k_i)` form.
pub fn split_kernel(rhs: &Expr) -> Result<Equation, ParseError> {
    let lower = match rhs.integral_count() {
        0 => None,
        1 => Some(find_lower(rhs)),
        _ => return Err(ParseError::MultipleIntegrals),
    };
    let (phi, outer, integrand) = match lower {
        None => (rhs.clone(), None, None),
        Some(_) => {
            let (phi, coef, integrand) = linear(rhs)?;
            (phi, coef, integrand)
        }
    };
    check_outside(&phi)?;
    let mut terms: Vec<KernelTerm> = Vec::new();
    if let (Some(coef), Some(integrand)) = (outer, integrand) {
        check_outside(&coef)?;
        let integrand = rewrite_trig_difference(&integrand);
        for (tpart, kpart) in separate(&integrand)? {
            let (f, kernel) = normalize(mul(coef.clone(), tpart), kpart);
            if kernel.is_const_value(0) {
                continue;
            }
            match terms.iter_mut().find(|k| k.f == f) {
                Some(existing) => existing.kernel = add(existing.kernel.clone(), kernel),
                None => terms.push(KernelTerm { f, kernel }),
            }
        }
    }
    Ok(Equation {
        label: "equation".to_string(),
        rhs: rhs.clone(),
        phi,
        terms,
        lower: lower.unwrap_or_else(BigRational::zero),
    })
}

fn find_lower(e: &Expr) -> BigRational {
    let mut found = BigRational::zero();
    visit(e, &mut |x| {
        if let Expr::Integral { lower, .. } = x {
            found = lower.clone();
        }
    });
    found
}

fn visit(e: &Expr, f: &mut impl FnMut(&Expr)) {
    f(e);
    match e {
        Expr::Const(_) | Expr::Var(_) => {}
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            visit(a, f);
            visit(b, f);
        }
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Apply(_, a) => visit(a, f),
        Expr::Integral { integrand, .. } => visit(integrand, f),
    }
}

/// Writes `e` as `phi + coef * I` where `I` is the single integral.
/// Returns `(phi, coef, integrand)`; `coef` is `None` when `e` is integral-free.
fn linear(e: &Expr) -> Result<(Expr, Option<Expr>, Option<Expr>), ParseError> {
    if !e.contains_integral() {
        return Ok((e.clone(), None, None));
    }
    let nonlinear = || ParseError::NonLinearIntegral { subtree: e.to_string() };
    Ok(match e {
        Expr::Integral { integrand, .. } => (Expr::int(0), Some(Expr::int(1)), Some((**integrand).clone())),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let minus = matches!(e, Expr::Sub(..));
            let (pa, ca, ia) = linear(a)?;
            let (pb, cb, ib) = linear(b)?;
            let phi = if minus { sub(pa, pb) } else { add(pa, pb) };
            let coef = match (ca, cb) {
                (Some(c), None) => c,
                (None, Some(c)) if minus => neg(c),
                (None, Some(c)) => c,
                _ => unreachable!("single integral"),
            };
            (phi, Some(coef), ia.or(ib))
        }
        Expr::Neg(a) => {
            let (p, c, i) = linear(a)?;
            (neg(p), c.map(neg), i)
        }
        Expr::Mul(a, b) => {
            let (inner, other, left) = if a.contains_integral() {
                (a, b, true)
            } else {
                (b, a, false)
            };
            let (p, c, i) = linear(inner)?;
            let m = (**other).clone();
            let scale = |x: Expr| if left { mul(x, m.clone()) } else { mul(m.clone(), x) };
            (scale(p), c.map(scale), i)
        }
        Expr::Div(a, b) if !b.contains_integral() => {
            let (p, c, i) = linear(a)?;
            let d = (**b).clone();
            (div(p, d.clone()), c.map(|c| div(c, d)), i)
        }
        _ => return Err(nonlinear()),
    })
}

fn check_outside(e: &Expr) -> Result<(), ParseError> {
    if e.contains_var(Var::S) {
        return Err(ParseError::Misplaced {
            what: "s",
            subtree: e.to_string(),
        });
    }
    if e.contains_var(Var::Y) {
        return Err(ParseError::Misplaced {
            what: "y(s)",
            subtree: e.to_string(),
        });
    }
    Ok(())
}

fn inner_dependent(e: &Expr) -> bool {
    e.contains_var(Var::S) || e.contains_var(Var::Y)
}

/// Expands `e` into a sum of products `t-part * (s, y)-part`.
fn separate(e: &Expr) -> Result<Vec<(Expr, Expr)>, ParseError> {
    if !e.contains_var(Var::T) {
        return Ok(vec![(Expr::int(1), e.clone())]);
    }
    if !inner_dependent(e) {
        return Ok(vec![(e.clone(), Expr::int(1))]);
    }
    let mixed = || ParseError::NonSeparable { subtree: e.to_string() };
    Ok(match e {
        Expr::Add(a, b) => {
            let mut out = separate(a)?;
            out.extend(separate(b)?);
            out
        }
        Expr::Sub(a, b) => {
            let mut out = separate(a)?;
            out.extend(separate(b)?.into_iter().map(|(t, k)| (t, neg(k))));
            out
        }
        Expr::Neg(a) => separate(a)?.into_iter().map(|(t, k)| (t, neg(k))).collect(),
        Expr::Mul(a, b) => product(&separate(a)?, &separate(b)?),
        Expr::Pow(a, n) => {
            let base = separate(a)?;
            let mut acc = base.clone();
            for _ in 1..*n {
                acc = product(&acc, &base);
            }
            acc
        }
        Expr::Div(a, b) if !inner_dependent(b) => separate(a)?
            .into_iter()
            .map(|(t, k)| (div(t, (**b).clone()), k))
            .collect(),
        Expr::Div(a, b) if !b.contains_var(Var::T) => separate(a)?
            .into_iter()
            .map(|(t, k)| (t, div(k, (**b).clone())))
            .collect(),
        _ => return Err(mixed()),
    })
}

fn product(xs: &[(Expr, Expr)], ys: &[(Expr, Expr)]) -> Vec<(Expr, Expr)> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for (ta, ka) in xs {
        for (tb, kb) in ys {
            out.push((mul(ta.clone(), tb.clone()), mul(ka.clone(), kb.clone())));
        }
    }
    out
}

/// Moves numeric factors and signs of `f` into the kernel.
fn normalize(f: Expr, kernel: Expr) -> (Expr, Expr) {
    match f {
        Expr::Const(c) => (Expr::int(1), mul(Expr::Const(c), kernel)),
        Expr::Neg(inner) => {
            let (f, k) = normalize(*inner, kernel);
            (f, neg(k))
        }
        Expr::Mul(a, b) if a.as_const().is_some() => {
            let (f, k) = normalize(*b, kernel);
            (f, mul((*a).clone(), k))
        }
        Expr::Mul(a, b) if b.as_const().is_some() => {
            let (f, k) = normalize(*a, kernel);
            (f, mul((*b).clone(), k))
        }
        other => (other, kernel),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn split(text: &str) -> Equation {
        split_kernel(&parse_expr(text).unwrap()).unwrap()
    }

    #[test]
    fn shifted_cosine_factor() {
        let eq = split("exp(t)*sin(t) + (2+cos(t))*int(y(s)/(2+cos(s)), s=0..t)");
        assert_eq!(eq.phi.to_string(), "exp(t)*sin(t)");
        assert_eq!(eq.terms.len(), 1);
        assert_eq!(eq.terms[0].f.to_string(), "2+cos(t)");
        assert_eq!(eq.terms[0].kernel.to_string(), "y(s)/(2+cos(s))");
    }

    #[test]
    fn difference_kernel_gives_two_terms() {
        let eq = split("1/2*sin(2*t) + int(3/2*y(s)^2*cos(s-t), s=0..t)");
        let fs: Vec<String> = eq.terms.iter().map(|k| k.f.to_string()).collect();
        assert_eq!(fs, ["cos(t)", "sin(t)"]);
        assert_eq!(eq.terms[0].kernel.to_string(), "3/2*y(s)^2*cos(s)");
        assert_eq!(eq.terms[1].kernel.to_string(), "3/2*y(s)^2*sin(s)");
    }

    #[test]
    fn negated_integral_moves_sign_inside() {
        let eq = split("1 - int(sin(y(s)), s=0..t)");
        assert_eq!(eq.phi, Expr::int(1));
        assert_eq!(eq.terms.len(), 1);
        assert_eq!(eq.terms[0].f, Expr::int(1));
        assert_eq!(eq.terms[0].kernel.to_string(), "-sin(y(s))");
    }

    #[test]
    fn constant_factor_moves_inside() {
        let eq = split("t + 3*int(s*y(s), s=1..t)");
        assert_eq!(eq.terms[0].f, Expr::int(1));
        assert_eq!(eq.terms[0].kernel.to_string(), "3*(s*y(s))");
        assert_eq!(eq.lower, BigRational::from_integer(1.into()));
    }

    #[test]
    fn division_of_whole_rhs() {
        let eq = split("(t + int(y(s), s=0..t))/2");
        assert_eq!(eq.phi.to_string(), "t/2");
        assert_eq!(eq.terms[0].f, Expr::int(1));
        assert_eq!(eq.terms[0].kernel.to_string(), "0.5*y(s)");
    }

    #[test]
    fn no_integral() {
        let eq = split("0");
        assert!(eq.terms.is_empty());
        assert_eq!(eq.phi, Expr::int(0));
    }

    #[test]
    fn rejections() {
        let e = parse_expr("sin(int(y(s), s=0..t))").unwrap();
        assert!(matches!(split_kernel(&e), Err(ParseError::NonLinearIntegral { .. })));
        let e = parse_expr("int(exp(t*s)*y(s), s=0..t)").unwrap();
        assert!(matches!(split_kernel(&e), Err(ParseError::NonSeparable { .. })));
        let e = parse_expr("s + int(y(s), s=0..t)").unwrap();
        assert!(matches!(split_kernel(&e), Err(ParseError::Misplaced { what: "s", .. })));
    }

    #[test]
    fn display_round_trip() {
        let eq = split("1 - int(sin(y(s)), s=0..t)");
        assert_eq!(eq.to_string(), "y(t) = 1 + int(-sin(y(s)),s=0..t)");
    }
}
