//! Picard iteration of an augmented system over truncated power series.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{Backend, Coefficient};
use crate::poly::SeriesEnv;
use crate::polynomialize::{AugmentedSystem, PolyRule};
use crate::series::{Series, SeriesError, SeriesRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PicardError {
    #[error("state has {got} components, system has {expected}")]
    Arity { expected: usize, got: usize },
    #[error("state backend {state} does not match system backend {system}")]
    Backend { state: Backend, system: Backend },
    #[error("at least one iteration is required")]
    NoIterations,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    /// Operator applications so far.
    pub k: usize,
    /// `components[0]` is `y`, `components[j]` is `v_j`.
    pub components: Vec<Series>,
    /// Largest `d` with coefficients `0..=d` of every component unchanged by
    /// the last step; `None` before the first step or if even `c0` moved.
    pub stable_degree: Option<usize>,
}

impl IterationState {
    pub fn y(&self) -> &Series {
        &self.components[0]
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Exactly this many steps.
    FixedIters(usize),
    /// Until `stable_degree` reaches the order, at most `max_iters` steps.
    Stabilize { max_iters: usize },
}

impl SolveMode {
    /// Stabilize with the default budget of `order + 4` steps.
    pub fn stabilize(order: usize) -> SolveMode {
        SolveMode::Stabilize { max_iters: order + 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub state: IterationState,
    pub iterations: usize,
    /// `stable_degree` after each step.
    pub trace: Vec<Option<usize>>,
    pub wall_time: Duration,
}

/// JSON view of a solve; `-1` in the trace means no coefficient was stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub label: String,
    pub order: usize,
    pub iterations: usize,
    pub backend: String,
    pub stable_degree: i64,
    pub trace: Vec<i64>,
    pub components: Vec<SeriesRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

fn degree_code(d: Option<usize>) -> i64 {
    d.map_or(-1, |d| d as i64)
}

impl SolveReport {
    pub fn y(&self) -> &Series {
        self.state.y()
    }

    /// Timing varies between runs, so it is included only on request.
    pub fn to_record(&self, label: &str, timing: bool) -> SolveRecord {
        SolveRecord {
            label: label.to_string(),
            order: self.state.order(),
            iterations: self.iterations,
            backend: self.state.y().backend().name().to_string(),
            stable_degree: degree_code(self.state.stable_degree),
            trace: self.trace.iter().copied().map(degree_code).collect(),
            components: self.state.components.iter().map(Series::to_record).collect(),
            wall_time_ms: timing.then_some(self.wall_time.as_secs_f64() * 1e3),
        }
    }
}

/// Constant series at every initial value: `y = phi(a)`, `v_j = v_j(a)`.
pub fn initial_state(sys: &AugmentedSystem, order: usize) -> IterationState {
    initial_state_from(sys, order, sys.y0.clone())
}

/// As [`initial_state`] but with `y` started from `y_start`.
pub fn initial_state_from(sys: &AugmentedSystem, order: usize, y_start: Coefficient) -> IterationState {
    let mut values = sys.initial_values();
    values[0] = y_start
        .to_backend(sys.backend)
        .expect("start value must fit the system backend");
    let components = values
        .into_iter()
        .map(|c| Series::constant(c, sys.a.clone(), order).expect("backends agree"))
        .collect();
    IterationState {
        k: 0,
        components,
        stable_degree: None,
    }
}

fn check(sys: &AugmentedSystem, st: &IterationState) -> Result<(), PicardError> {
    if st.components.len() != sys.arity() {
        return Err(PicardError::Arity {
            expected: sys.arity(),
            got: st.components.len(),
        });
    }
    let backend = st.components[0].backend();
    if backend != sys.backend {
        return Err(PicardError::Backend {
            state: backend,
            system: sys.backend,
        });
    }
    Ok(())
}

fn apply_rule(rule: &PolyRule, env: &mut SeriesEnv<'_>) -> Result<Series, SeriesError> {
    let mut out = rule.explicit.eval_series(env)?;
    for term in &rule.terms {
        let integral = term.integrand.eval_series(env)?.integrate();
        let piece = match term.outer.as_constant() {
            Some(c) if c.is_one() => integral,
            Some(c) => integral.scale(&c)?,
            None => term.outer.eval_series(env)?.mul(&integral)?,
        };
        out = out.add(&piece)?;
    }
    Ok(out)
}

/// Images of every component under one application of the system's rules,
/// all computed from the current iterate.
fn image(sys: &AugmentedSystem, st: &IterationState) -> Result<Vec<Series>, PicardError> {
    check(sys, st)?;
    let mut env = SeriesEnv::new(&st.components);
    Ok(sys
        .rules()
        .map(|rule| apply_rule(rule, &mut env))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Tolerance for float coefficient comparison at `digits`: `10^(4 - digits)`.
fn tolerance(backend: Backend) -> Option<Coefficient> {
    let digits = backend.digits()?;
    let q = BigRational::new(1.into(), num_traits::pow(BigInt::from(10), (digits - 4) as usize));
    Some(Coefficient::from_rational(q, backend))
}

fn same(a: &Coefficient, b: &Coefficient, tol: Option<&Coefficient>) -> bool {
    match tol {
        None => a == b,
        Some(tol) => (a - b).abs().cmp_value(tol).is_le(),
    }
}

/// Largest `d` such that coefficients `0..=d` agree in every component.
pub fn stable_degree(old: &[Series], new: &[Series]) -> Option<usize> {
    let tol = tolerance(new[0].backend());
    let order = new[0].order();
    let mut d = None;
    for j in 0..=order {
        let agree = old
            .iter()
            .zip(new)
            .all(|(a, b)| same(a.coeff(j), b.coeff(j), tol.as_ref()));
        if !agree {
            break;
        }
        d = Some(j);
    }
    d
}

/// One simultaneous Picard step.
pub fn step(sys: &AugmentedSystem, st: &IterationState) -> Result<IterationState, PicardError> {
    let components = image(sys, st)?;
    Ok(IterationState {
        k: st.k + 1,
        stable_degree: stable_degree(&st.components, &components),
        components,
    })
}

pub fn solve(sys: &AugmentedSystem, order: usize, mode: SolveMode) -> Result<SolveReport, PicardError> {
    solve_from(sys, initial_state(sys, order), mode)
}

/// Runs `mode` starting from an explicit state.
pub fn solve_from(sys: &AugmentedSystem, start: IterationState, mode: SolveMode) -> Result<SolveReport, PicardError> {
    let clock = Instant::now();
    let order = start.order();
    let (budget, stop_early) = match mode {
        SolveMode::FixedIters(k) => (k, false),
        SolveMode::Stabilize { max_iters } => (max_iters, true),
    };
    if budget == 0 {
        return Err(PicardError::NoIterations);
    }
    let mut state = start;
    let mut trace = Vec::with_capacity(budget);
    for _ in 0..budget {
        state = step(sys, &state)?;
        trace.push(state.stable_degree);
        if stop_early && state.stable_degree == Some(order) {
            break;
        }
    }
    Ok(SolveReport {
        iterations: trace.len(),
        trace,
        state,
        wall_time: clock.elapsed(),
    })
}

/// Per component, the right-hand side at `st` minus the component itself.
pub fn residual(sys: &AugmentedSystem, st: &IterationState) -> Result<Vec<Series>, PicardError> {
    let images = image(sys, st)?;
    Ok(images
        .iter()
        .zip(&st.components)
        .map(|(img, cur)| img.sub(cur))
        .collect::<Result<Vec<_>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::polynomialize::{assemble, PolyConfig};

    const EX2: &str = "y(t) = 1/2*sin(2*t) + int(3/2*y(s)^2*cos(s-t), s=0..t)";

    fn system(text: &str) -> AugmentedSystem {
        assemble(&parse(text).unwrap(), &PolyConfig::default()).unwrap()
    }

    fn ints(s: &Series) -> Vec<String> {
        s.coeffs().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn first_step_of_difference_kernel() {
        let sys = system(EX2);
        let st = step(&sys, &initial_state(&sys, 4)).unwrap();
        assert_eq!(ints(&st.components[0]), ["0"; 5]);
        assert_eq!(ints(&st.components[1]), ["0", "1", "0", "0", "0"]);
        assert_eq!(ints(&st.components[2]), ["1", "0", "0", "0", "0"]);
        assert_eq!(st.stable_degree, Some(0));
    }

    #[test]
    fn constant_system_is_fixed() {
        let sys = system("y(t) = 3");
        let report = solve(&sys, 5, SolveMode::FixedIters(3)).unwrap();
        assert_eq!(ints(report.y()), ["3", "0", "0", "0", "0", "0"]);
        assert_eq!(report.trace, [Some(5); 3]);
        let r = residual(&sys, &report.state).unwrap();
        assert!(r.iter().all(|s| s.coeffs().iter().all(Coefficient::is_zero)));
    }

    #[test]
    fn stabilize_stops_early() {
        // y = 1 + int(y): e^t
        let sys = system("y(t) = 1 + int(y(s), s=0..t)");
        let report = solve(&sys, 6, SolveMode::stabilize(6)).unwrap();
        assert_eq!(report.state.stable_degree, Some(6));
        assert!(report.iterations <= 10);
        assert_eq!(ints(report.y()), ["1", "1", "1/2", "1/6", "1/24", "1/120", "1/720"]);
        assert_eq!(report.trace.len(), report.iterations);
    }

    #[test]
    fn arity_is_checked() {
        let sys = system(EX2);
        let mut st = initial_state(&sys, 3);
        st.components.pop();
        assert!(matches!(
            step(&sys, &st),
            Err(PicardError::Arity { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn record_omits_timing_by_default() {
        let sys = system(EX2);
        let report = solve(&sys, 3, SolveMode::FixedIters(2)).unwrap();
        let rec = report.to_record("ex2", false);
        assert!(rec.wall_time_ms.is_none());
        assert_eq!(rec.trace.len(), 2);
        assert!(report.to_record("ex2", true).wall_time_ms.is_some());
    }
}
