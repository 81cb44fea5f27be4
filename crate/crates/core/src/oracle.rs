//! Trapezoid-rule solver for second-kind Volterra equations, independent of
//! the series machinery, used to cross-check series solutions.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::coeff::{CoeffError, Coefficient, MIN_DIGITS};
use crate::expr::{eval_numeric, Bindings, Equation, EvalError, Expr};
use crate::series::{Series, SeriesError};

pub const MAX_SWEEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step must be positive (got {0})")]
    Step(String),
    #[error("horizon {horizon} must lie beyond the start point {start}")]
    Horizon { horizon: String, start: String },
    #[error("precision must be at least {MIN_DIGITS} digits (got {0})")]
    Precision(u32),
    #[error("fixed point at t = {t} did not converge in {sweeps} sweeps")]
    NoConvergence { t: String, sweeps: usize },
    #[error("window [{0}, {1}] contains no grid nodes")]
    EmptyWindow(String, String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub h: BigRational,
    /// Exact nodes `a + n*h`.
    pub nodes: Vec<BigRational>,
    /// Float values at the working precision.
    pub values: Vec<Coefficient>,
    pub digits: u32,
}

fn decimal(q: &BigRational) -> String {
    let text = Coefficient::Rational(q.clone()).round_to_places(20);
    match text.split_once('.') {
        Some((int, frac)) => {
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        }
        None => text,
    }
}

impl GridSolution {
    /// `t,y` rows at full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y\n");
        for (t, y) in self.nodes.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", decimal(t), y.to_scientific(self.digits as usize));
        }
        out
    }

    /// Value at the node closest to `t`.
    pub fn value_near(&self, t: &BigRational) -> &Coefficient {
        let a = &self.nodes[0];
        let n = ((t - a) / &self.h).round().to_integer().to_usize().unwrap_or(0);
        &self.values[n.min(self.values.len() - 1)]
    }
}

struct Evaluator<'a> {
    eq: &'a Equation,
    digits: u32,
}

impl Evaluator<'_> {
    fn at(&self, e: &Expr, b: &Bindings) -> Result<Coefficient, OracleError> {
        Ok(eval_numeric(e, b, self.digits)?)
    }

    fn kernels(&self, s: &BigRational, y: &Coefficient) -> Result<Vec<Coefficient>, OracleError> {
        let b = Bindings::default()
            .with_s(Coefficient::Rational(s.clone()))
            .with_y(y.clone());
        self.eq.terms.iter().map(|k| self.at(&k.kernel, &b)).collect()
    }
}

/// Solves `eq` on `[a, horizon]` with step `h` by the trapezoid rule.
///
/// Each node solves its implicit equation by fixed-point iteration to within
/// `10^(4 - digits)`, switching to half-step damping once successive
/// corrections alternate in sign without shrinking.
pub fn trapezoid_solve(
    eq: &Equation,
    h: &BigRational,
    horizon: &BigRational,
    digits: u32,
) -> Result<GridSolution, OracleError> {
    if !h.is_positive() {
        return Err(OracleError::Step(decimal(h)));
    }
    if digits < MIN_DIGITS {
        return Err(OracleError::Precision(digits));
    }
    let a = eq.lower.clone();
    if horizon <= &a {
        return Err(OracleError::Horizon {
            horizon: decimal(horizon),
            start: decimal(&a),
        });
    }
    let steps = ((horizon - &a) / h).round().to_integer().to_usize().unwrap_or(1).max(1);
    let ev = Evaluator { eq, digits };
    let half = Coefficient::ratio(1, 2).promote(digits)?;
    let hf = Coefficient::Rational(h.clone()).promote(digits)?;
    let tol = Coefficient::from_rational(
        BigRational::new(
            1.into(),
            num_traits::pow(num_bigint::BigInt::from(10), (digits - 4) as usize),
        ),
        crate::coeff::Backend::float(digits)?,
    );

    let y0 = ev.at(&eq.phi, &Bindings::at_t(Coefficient::Rational(a.clone())))?;
    // running sums of 1/2 k(t0) + k(t1) + ... + k(t_{n-1}) per kernel term
    let mut sums: Vec<Coefficient> = ev.kernels(&a, &y0)?.iter().map(|k| k * &half).collect();
    let mut nodes = vec![a.clone()];
    let mut values = vec![y0];

    for n in 1..=steps {
        let t = &a + h * BigRational::from_integer(n.into());
        let bt = Bindings::at_t(Coefficient::Rational(t.clone()));
        let phi = ev.at(&eq.phi, &bt)?;
        let fs: Vec<Coefficient> = eq.terms.iter().map(|k| ev.at(&k.f, &bt)).collect::<Result<_, _>>()?;
        let g = |y: &Coefficient| -> Result<Coefficient, OracleError> {
            let ks = ev.kernels(&t, y)?;
            let mut acc = phi.clone();
            for ((f, s), k) in fs.iter().zip(&sums).zip(&ks) {
                let inner = s + &(k * &half);
                acc = &acc + &(f * &(&hf * &inner));
            }
            Ok(acc)
        };

        // linear extrapolation from the last two nodes as the first guess
        let last = &values[n - 1];
        let mut y = if n >= 2 {
            &(last + last) - &values[n - 2]
        } else {
            last.clone()
        };
        let mut damped = false;
        let mut prev: Option<Coefficient> = None;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let next = g(&y)?;
            let delta = &next - &y;
            if delta.abs().cmp_value(&tol).is_le() {
                y = next;
                converged = true;
                break;
            }
            if let Some(p) = &prev {
                let flipped = p.is_negative() != delta.is_negative();
                if flipped && delta.abs().cmp_value(&p.abs()).is_ge() {
                    damped = true;
                }
            }
            y = if damped { &y + &(&delta * &half) } else { next };
            prev = Some(delta);
        }
        if !converged {
            return Err(OracleError::NoConvergence {
                t: decimal(&t),
                sweeps: MAX_SWEEPS,
            });
        }
        for (s, k) in sums.iter_mut().zip(ev.kernels(&t, &y)?) {
            *s = &*s + &k;
        }
        nodes.push(t);
        values.push(y);
    }
    Ok(GridSolution {
        h: h.clone(),
        nodes,
        values,
        digits,
    })
}

fn deviation(series: &Series, t: &BigRational, y: &Coefficient, digits: u32) -> Result<Coefficient, OracleError> {
    let s = series.evaluate(&Coefficient::Rational(t.clone()).to_backend(series.backend())?)?;
    let (s, y) = s.unify(y, digits)?;
    Ok(s.try_sub(&y)?.abs())
}

/// Largest `|series(t_n) - y_n|` over grid nodes in `[lo, hi]`.
pub fn compare(
    series: &Series,
    grid: &GridSolution,
    lo: &BigRational,
    hi: &BigRational,
) -> Result<Coefficient, OracleError> {
    let mut worst: Option<Coefficient> = None;
    for (t, y) in grid.nodes.iter().zip(&grid.values) {
        if t < lo || t > hi {
            continue;
        }
        let d = deviation(series, t, y, grid.digits)?;
        if worst.as_ref().is_none_or(|w| d.cmp_value(w).is_gt()) {
            worst = Some(d);
        }
    }
    worst.ok_or_else(|| OracleError::EmptyWindow(decimal(lo), decimal(hi)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: BigRational,
    pub series: Coefficient,
    pub reference: Coefficient,
    pub error: Coefficient,
}

/// Evenly spaced points `lo, ..., hi` (`samples >= 2`, or just `lo`).
pub fn sample_points(lo: &BigRational, hi: &BigRational, samples: usize) -> Vec<BigRational> {
    if samples <= 1 || lo == hi {
        return vec![lo.clone()];
    }
    let span = hi - lo;
    let last = BigRational::from_integer((samples - 1).into());
    (0..samples)
        .map(|i| lo + &span * BigRational::from_integer(i.into()) / &last)
        .collect()
}

/// Series against a closed form in `t` at the given points.
pub fn reference_errors(
    series: &Series,
    reference: &Expr,
    points: &[BigRational],
    digits: u32,
) -> Result<Vec<Sample>, OracleError> {
    points
        .iter()
        .map(|t| {
            let tc = Coefficient::Rational(t.clone());
            let r = eval_numeric(reference, &Bindings::at_t(tc.clone()), digits)?;
            let s = series.evaluate(&tc.to_backend(series.backend())?)?.promote(digits)?;
            let error = (&s - &r).abs();
            Ok(Sample {
                t: t.clone(),
                series: s,
                reference: r,
                error,
            })
        })
        .collect()
}

/// Series against the grid at the nodes closest to the given points.
pub fn grid_errors(series: &Series, grid: &GridSolution, points: &[BigRational]) -> Result<Vec<Sample>, OracleError> {
    points
        .iter()
        .map(|t| {
            let r = grid.value_near(t).clone();
            let s = series
                .evaluate(&Coefficient::Rational(t.clone()).to_backend(series.backend())?)?
                .promote(grid.digits)?;
            let error = (&s - &r).abs();
            Ok(Sample {
                t: t.clone(),
                series: s,
                reference: r,
                error,
            })
        })
        .collect()
}

/// Largest error in a list of samples.
pub fn max_error(samples: &[Sample]) -> Option<&Coefficient> {
    samples.iter().map(|s| &s.error).max_by(|a, b| a.cmp_value(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, parse_expr};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_kernel_reproduces_phi() {
        let eq = parse("y(t) = 1").unwrap();
        let g = trapezoid_solve(&eq, &q(1, 10), &q(1, 1), 32).unwrap();
        assert_eq!(g.nodes.len(), 11);
        assert!(g
            .values
            .iter()
            .all(|v| v.round_to_places(30) == format!("1.{}", "0".repeat(30))));
        let eq = parse("y(t) = sin(t)").unwrap();
        let g = trapezoid_solve(&eq, &q(1, 4), &q(1, 1), 32).unwrap();
        assert!((g.values[2].to_f64() - 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn csv_rows() {
        let eq = parse("y(t) = 1").unwrap();
        let g = trapezoid_solve(&eq, &q(1, 2), &q(1, 1), 32).unwrap();
        let csv = g.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,y");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0.5,1"));
    }

    #[test]
    fn rejects_bad_input() {
        let eq = parse("y(t) = 1").unwrap();
        assert!(matches!(
            trapezoid_solve(&eq, &q(0, 1), &q(1, 1), 32),
            Err(OracleError::Step(_))
        ));
        assert!(matches!(
            trapezoid_solve(&eq, &q(1, 10), &q(0, 1), 32),
            Err(OracleError::Horizon { .. })
        ));
    }

    #[test]
    fn compare_identical_and_against_zero() {
        let eq = parse("y(t) = 1/2*sin(2*t) + int(3/2*y(s)^2*cos(s-t), s=0..t)").unwrap();
        let g = trapezoid_solve(&eq, &q(1, 20), &q(1, 1), 32).unwrap();
        let zero = Series::zero(Coefficient::from(0), 5);
        let d = compare(&zero, &g, &q(0, 1), &q(1, 1)).unwrap();
        assert!((d.to_f64() - 1f64.sin()).abs() < 1e-2);
        assert!(matches!(
            compare(&zero, &g, &q(2, 1), &q(3, 1)),
            Err(OracleError::EmptyWindow(..))
        ));
    }

    #[test]
    fn reference_samples() {
        let s = Series::new(Coefficient::from(0), vec![0.into(), 1.into()]).unwrap();
        let r = parse_expr("t").unwrap();
        let pts = sample_points(&q(0, 1), &q(1, 1), 5);
        assert_eq!(pts.len(), 5);
        let errs = reference_errors(&s, &r, &pts, 32).unwrap();
        assert!(errs.iter().all(|e| e.error.is_zero()));
    }
}
