//! Rewrites an equation as a polynomial Volterra system by introducing
//! auxiliary variables for every non-polynomial subexpression.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{Backend, CoeffError, Coefficient, Func, DEFAULT_DIGITS};
use crate::expr::{add, eval, mul, pow, sub, Bindings, Equation, EvalError, Expr, Var};
use crate::poly::{Polynomial, SysVar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("auxiliary variable cap of {0} exceeded")]
    TooManyVariables(usize),
    #[error("polynomial degree {degree} in {what} exceeds the cap of {cap}")]
    DegreeCap { what: String, degree: u32, cap: u32 },
    #[error("`{var}` needs y', which is unavailable: {reason}")]
    YPrimeUnavailable { var: String, reason: String },
    #[error("subexpression `{0}` is not in the auxiliary table")]
    Untabled(String),
    #[error("cannot polynomialize `{0}`")]
    Unsupported(String),
    #[error("derivative of v{0} depends on itself")]
    Cycle(usize),
    #[error("rational backend requested but {0} is not rational")]
    Irrational(String),
    #[error("initial value: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyConfig {
    /// Working precision for float constants and, if chosen, the float backend.
    pub digits: u32,
    pub max_vars: usize,
    pub max_degree: u32,
    /// Forces a backend; by default rational when everything is rational.
    pub backend: Option<Backend>,
}

impl Default for PolyConfig {
    fn default() -> Self {
        PolyConfig {
            digits: DEFAULT_DIGITS,
            max_vars: 32,
            max_degree: 16,
            backend: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxKind {
    /// `func(u)` for an elementary function.
    Elementary(Func),
    /// `1/u`.
    Reciprocal,
    /// A named non-monomial polynomial, introduced as a denominator.
    Compound,
}

impl AuxKind {
    pub fn name(self) -> &'static str {
        match self {
            AuxKind::Elementary(f) => f.name(),
            AuxKind::Reciprocal => "reciprocal",
            AuxKind::Compound => "compound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxVariable {
    /// 1-based; `v_index` is component `index` of an iteration state.
    pub index: usize,
    pub kind: AuxKind,
    /// In terms of `t` and `y`.
    pub definition: Expr,
    pub initial: Coefficient,
    /// `v_index' = rhs`.
    pub rhs: Polynomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTerm {
    /// Evaluated at `t`, multiplies the integral.
    pub outer: Polynomial,
    /// Evaluated at `s` under the integral.
    pub integrand: Polynomial,
}

/// `component = explicit(t) + sum outer(t) * int(integrand(s), s=a..t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRule {
    pub explicit: Polynomial,
    pub terms: Vec<RuleTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub label: String,
    pub variables: Vec<AuxVariable>,
    pub y_rule: PolyRule,
    pub v_rules: Vec<PolyRule>,
    pub y0: Coefficient,
    pub a: Coefficient,
    pub backend: Backend,
    /// `y' ` as a polynomial, when every `f_i` is constant.
    pub y_prime: Option<Polynomial>,
    /// Why `y'` is unavailable, when it is.
    pub y_prime_note: Option<String>,
    config: PolyConfig,
}

enum YPrime {
    Pending,
    Busy,
    Ready(Polynomial),
    Unavailable(String),
}

struct Source {
    phi: Polynomial,
    constants: Vec<Result<Coefficient, String>>,
    kernels: Vec<Polynomial>,
}

struct Builder {
    config: PolyConfig,
    defs: Vec<(Expr, AuxKind)>,
    lookup: HashMap<Expr, usize>,
    rhs: Vec<Option<Polynomial>>,
    busy: HashSet<usize>,
    y_prime: YPrime,
    source: Option<Source>,
    frozen: bool,
}

fn double_arg(u: &Expr) -> Option<&Expr> {
    match u {
        Expr::Mul(a, w) | Expr::Mul(w, a) if a.is_const_value(2) => Some(w),
        _ => None,
    }
}

fn reciprocal_key(den: &Expr) -> Expr {
    Expr::Div(Box::new(Expr::int(1)), Box::new(den.clone()))
}

impl Builder {
    fn new(config: PolyConfig) -> Builder {
        Builder {
            config,
            defs: Vec::new(),
            lookup: HashMap::new(),
            rhs: Vec::new(),
            busy: HashSet::new(),
            y_prime: YPrime::Pending,
            source: None,
            frozen: false,
        }
    }

    fn from_table(config: PolyConfig, vars: &[AuxVariable]) -> Builder {
        let mut b = Builder::new(config);
        for v in vars {
            b.defs.push((v.definition.clone(), v.kind));
            b.lookup.insert(v.definition.clone(), v.index);
            b.rhs.push(Some(v.rhs.clone()));
        }
        b.frozen = true;
        b
    }

    fn register(&mut self, def: Expr, kind: AuxKind) -> Result<usize, PolyError> {
        if let Some(&j) = self.lookup.get(&def) {
            return Ok(j);
        }
        if self.frozen {
            return Err(PolyError::Untabled(def.display_in_t().to_string()));
        }
        if self.defs.len() >= self.config.max_vars {
            return Err(PolyError::TooManyVariables(self.config.max_vars));
        }
        self.defs.push((def.clone(), kind));
        let j = self.defs.len();
        self.lookup.insert(def, j);
        self.rhs.push(None);
        Ok(j)
    }

    fn constant(&self, e: &Expr) -> Result<Coefficient, PolyError> {
        Ok(eval(e, &Bindings::default(), self.config.digits)?)
    }

    fn lower(&mut self, e: &Expr) -> Result<Polynomial, PolyError> {
        self.lower_node(e, true)
    }

    fn lower_node(&mut self, e: &Expr, lookup: bool) -> Result<Polynomial, PolyError> {
        if e.is_constant() {
            return Ok(Polynomial::constant(self.constant(e)?));
        }
        if lookup {
            if let Some(&j) = self.lookup.get(e) {
                return Ok(Polynomial::var(SysVar::Aux(j)));
            }
        }
        Ok(match e {
            Expr::Var(Var::T) => Polynomial::var(SysVar::T),
            Expr::Var(Var::Y) => Polynomial::var(SysVar::Y),
            Expr::Add(a, b) => self.lower(a)?.add(&self.lower(b)?),
            Expr::Sub(a, b) => self.lower(a)?.sub(&self.lower(b)?),
            Expr::Mul(a, b) => self.lower(a)?.mul(&self.lower(b)?),
            Expr::Neg(a) => self.lower(a)?.neg(),
            Expr::Pow(a, n) => self.lower(a)?.pow(*n),
            Expr::Div(a, b) if b.is_constant() => {
                let c = self.constant(b)?;
                let inv = Coefficient::from(1).unify(&c, self.config.digits)?;
                let inv = inv.0.try_div(&inv.1)?;
                self.lower(a)?.scale(&inv)
            }
            Expr::Div(a, b) => {
                let num = self.lower(a)?;
                let r = self.reciprocal(b)?;
                num.mul(&Polynomial::var(SysVar::Aux(r)))
            }
            Expr::Apply(Func::Sin, u) if double_arg(u).is_some() => {
                let w = double_arg(u).unwrap().clone();
                let e = mul(
                    Expr::int(2),
                    mul(Expr::apply(Func::Sin, w.clone()), Expr::apply(Func::Cos, w)),
                );
                self.lower(&e)?
            }
            Expr::Apply(Func::Cos, u) if double_arg(u).is_some() => {
                let w = double_arg(u).unwrap().clone();
                let e = sub(
                    pow(Expr::apply(Func::Cos, w.clone()), 2),
                    pow(Expr::apply(Func::Sin, w), 2),
                );
                self.lower(&e)?
            }
            Expr::Apply(Func::Tan, u) => {
                let u = (**u).clone();
                self.lower(&Expr::Div(
                    Box::new(Expr::apply(Func::Sin, u.clone())),
                    Box::new(Expr::apply(Func::Cos, u)),
                ))?
            }
            Expr::Apply(Func::Cot, u) => {
                let u = (**u).clone();
                self.lower(&Expr::Div(
                    Box::new(Expr::apply(Func::Cos, u.clone())),
                    Box::new(Expr::apply(Func::Sin, u)),
                ))?
            }
            Expr::Apply(func, u) => {
                self.lower(u)?;
                let j = self.register(e.clone(), AuxKind::Elementary(*func))?;
                Polynomial::var(SysVar::Aux(j))
            }
            _ => return Err(PolyError::Unsupported(e.display_in_t().to_string())),
        })
    }

    /// Variable for `1/den`, naming `den` first when it is not a single variable.
    fn reciprocal(&mut self, den: &Expr) -> Result<usize, PolyError> {
        let key = reciprocal_key(den);
        if let Some(&j) = self.lookup.get(&key) {
            return Ok(j);
        }
        let lowered = self.lower(den)?;
        if lowered.as_single_var().is_none() {
            self.register(den.clone(), AuxKind::Compound)?;
        }
        self.register(key, AuxKind::Reciprocal)
    }

    fn derivative(&mut self, p: &Polynomial) -> Result<Polynomial, PolyError> {
        p.derivation(|v| self.var_derivative(v))
    }

    fn var_derivative(&mut self, v: SysVar) -> Result<Polynomial, PolyError> {
        match v {
            SysVar::T => Ok(Polynomial::one()),
            SysVar::Y => self.y_prime(),
            SysVar::Aux(j) => self.rhs_of(j),
        }
    }

    fn y_prime(&mut self) -> Result<Polynomial, PolyError> {
        match &self.y_prime {
            YPrime::Ready(p) => return Ok(p.clone()),
            YPrime::Unavailable(reason) => {
                return Err(PolyError::YPrimeUnavailable {
                    var: "y".into(),
                    reason: reason.clone(),
                })
            }
            YPrime::Busy => return Err(PolyError::Cycle(0)),
            YPrime::Pending => {}
        }
        let Some(src) = self.source.take() else {
            let reason = "no equation in scope".to_string();
            self.y_prime = YPrime::Unavailable(reason.clone());
            return Err(PolyError::YPrimeUnavailable {
                var: "y".into(),
                reason,
            });
        };
        if let Some(Err(reason)) = src.constants.iter().find(|c| c.is_err()) {
            let reason = reason.clone();
            self.source = Some(src);
            self.y_prime = YPrime::Unavailable(reason.clone());
            return Err(PolyError::YPrimeUnavailable {
                var: "y".into(),
                reason,
            });
        }
        self.y_prime = YPrime::Busy;
        let result = (|| {
            let mut p = self.derivative(&src.phi)?;
            for (c, r) in src.constants.iter().zip(&src.kernels) {
                p = p.add(&r.scale(c.as_ref().expect("checked above")));
            }
            Ok(p)
        })();
        self.source = Some(src);
        match result {
            Ok(p) => {
                self.y_prime = YPrime::Ready(p.clone());
                Ok(p)
            }
            Err(e) => {
                self.y_prime = YPrime::Pending;
                Err(e)
            }
        }
    }

    fn rhs_of(&mut self, j: usize) -> Result<Polynomial, PolyError> {
        if let Some(p) = &self.rhs[j - 1] {
            return Ok(p.clone());
        }
        if !self.busy.insert(j) {
            return Err(PolyError::Cycle(j));
        }
        let p = self.compute_rhs(j).map_err(|e| match e {
            PolyError::YPrimeUnavailable { reason, .. } => PolyError::YPrimeUnavailable {
                var: format!("v{j} = {}", self.defs[j - 1].0.display_in_t()),
                reason,
            },
            other => other,
        });
        self.busy.remove(&j);
        let p = p?;
        self.check_degree(&p, &format!("v{j}'"))?;
        self.rhs[j - 1] = Some(p.clone());
        Ok(p)
    }

    fn compute_rhs(&mut self, j: usize) -> Result<Polynomial, PolyError> {
        let (def, kind) = self.defs[j - 1].clone();
        let me = Polynomial::var(SysVar::Aux(j));
        Ok(match (kind, &def) {
            (AuxKind::Elementary(func), Expr::Apply(_, u)) => {
                let u = (**u).clone();
                let lu = self.lower(&u)?;
                let du = self.derivative(&lu)?;
                match func {
                    Func::Sin => self.lower(&Expr::apply(Func::Cos, u))?.mul(&du),
                    Func::Cos => self.lower(&Expr::apply(Func::Sin, u))?.neg().mul(&du),
                    Func::Exp => me.mul(&du),
                    Func::Ln => {
                        let r = self.reciprocal(&u)?;
                        du.mul(&Polynomial::var(SysVar::Aux(r)))
                    }
                    Func::Arccot => {
                        let r = self.reciprocal(&add(Expr::int(1), pow(u, 2)))?;
                        du.mul(&Polynomial::var(SysVar::Aux(r))).neg()
                    }
                    Func::Tan | Func::Cot => return Err(PolyError::Unsupported(def.display_in_t().to_string())),
                }
            }
            (AuxKind::Reciprocal, Expr::Div(_, den)) => {
                let lden = self.lower(den)?;
                self.derivative(&lden)?.neg().mul(&me.pow(2))
            }
            (AuxKind::Compound, _) => {
                let inner = self.lower_node(&def, false)?;
                self.derivative(&inner)?
            }
            _ => return Err(PolyError::Unsupported(def.display_in_t().to_string())),
        })
    }

    fn check_degree(&self, p: &Polynomial, what: &str) -> Result<(), PolyError> {
        let degree = p.degree();
        if degree > self.config.max_degree {
            return Err(PolyError::DegreeCap {
                what: what.to_string(),
                degree,
                cap: self.config.max_degree,
            });
        }
        Ok(())
    }

    /// Computes every pending right-hand side until the table stops growing.
    fn close(&mut self) -> Result<(), PolyError> {
        let mut j = 1;
        while j <= self.defs.len() {
            self.rhs_of(j)?;
            j += 1;
        }
        Ok(())
    }
}

/// Kernel in `(t, y)` form: `s` renamed to `t`.
fn kernel_in_t(kernel: &Expr) -> Expr {
    kernel.rename(Var::S, Var::T)
}

/// Auxiliary variables for a set of expressions in `t` alone (or in `y` when
/// no derivative of `y` is required). Initial values are taken at `at`.
pub fn closure(exprs: &[Expr], at: &Bindings, config: &PolyConfig) -> Result<Vec<AuxVariable>, PolyError> {
    let mut b = Builder::new(config.clone());
    for e in exprs {
        b.lower(e)?;
    }
    b.close()?;
    collect_variables(&b, at)
}

fn collect_variables(b: &Builder, at: &Bindings) -> Result<Vec<AuxVariable>, PolyError> {
    b.defs
        .iter()
        .enumerate()
        .map(|(i, (def, kind))| {
            Ok(AuxVariable {
                index: i + 1,
                kind: *kind,
                definition: def.clone(),
                initial: eval(def, at, b.config.digits)?,
                rhs: b.rhs[i].clone().expect("closure computed every rhs"),
            })
        })
        .collect()
}

/// `y'` as a polynomial in the system variables, when every `f_i` is constant.
pub fn derive_y_prime(eq: &Equation, config: &PolyConfig) -> Result<Option<Polynomial>, PolyError> {
    Ok(assemble(eq, config)?.y_prime)
}

/// Builds the augmented polynomial system for `eq`.
pub fn assemble(eq: &Equation, config: &PolyConfig) -> Result<AugmentedSystem, PolyError> {
    if let Some(Backend::Float { digits }) = config.backend {
        Backend::float(digits)?;
    }
    let mut b = Builder::new(config.clone());
    let kernels: Vec<Expr> = eq.terms.iter().map(|k| kernel_in_t(&k.kernel)).collect();

    let phi = b.lower(&eq.phi)?;
    let mut constants = Vec::new();
    for term in &eq.terms {
        b.lower(&term.f)?;
        constants.push(if term.f.is_constant() {
            b.constant(&term.f).map_err(|e| e.to_string())
        } else {
            Err(format!("f(t) = {} is not constant", term.f))
        });
    }
    let mut lowered_kernels = Vec::new();
    for k in &kernels {
        lowered_kernels.push(b.lower(k)?);
    }
    b.source = Some(Source {
        phi,
        constants,
        kernels: lowered_kernels,
    });

    // close, then re-lower with the complete table so named compounds are used
    let (phi, outers, inners) = loop {
        let before = b.defs.len();
        b.close()?;
        let phi = b.lower(&eq.phi)?;
        let outers = eq.terms.iter().map(|k| b.lower(&k.f)).collect::<Result<Vec<_>, _>>()?;
        let inners = kernels.iter().map(|k| b.lower(k)).collect::<Result<Vec<_>, _>>()?;
        if b.defs.len() == before {
            break (phi, outers, inners);
        }
    };
    let y_prime_note = match b.y_prime() {
        Ok(_) => None,
        Err(PolyError::YPrimeUnavailable { reason, .. }) => Some(reason),
        Err(e) => return Err(e),
    };
    b.close()?;
    let y_prime = match &b.y_prime {
        YPrime::Ready(p) => Some(p.clone()),
        _ => None,
    };

    b.check_degree(&phi, "phi")?;
    for (q, r) in outers.iter().zip(&inners) {
        b.check_degree(q, "f")?;
        b.check_degree(r, "kernel")?;
    }

    let a = Coefficient::Rational(eq.lower.clone());
    let y0 = eval(&eq.phi, &Bindings::at_t(a.clone()), config.digits)?;
    let at = Bindings::at_t(a.clone()).with_y(y0.clone());
    let variables = collect_variables(&b, &at)?;

    let y_rule = PolyRule {
        explicit: phi,
        terms: outers
            .into_iter()
            .zip(inners)
            .map(|(outer, integrand)| RuleTerm { outer, integrand })
            .collect(),
    };
    let v_rules = variables
        .iter()
        .map(|v| PolyRule {
            explicit: Polynomial::constant(v.initial.clone()),
            terms: vec![RuleTerm {
                outer: Polynomial::one(),
                integrand: v.rhs.clone(),
            }],
        })
        .collect();

    let system = AugmentedSystem {
        label: eq.label.clone(),
        variables,
        y_rule,
        v_rules,
        y0,
        a,
        backend: Backend::Rational,
        y_prime,
        y_prime_note,
        config: config.clone(),
    };
    let backend = match config.backend {
        Some(forced) => forced,
        None if system.is_rational() => Backend::Rational,
        None => Backend::float(config.digits)?,
    };
    system.to_backend(backend)
}

impl PolyRule {
    fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        std::iter::once(&self.explicit).chain(self.terms.iter().flat_map(|t| [&t.outer, &t.integrand]))
    }

    fn to_backend(&self, backend: Backend) -> Result<PolyRule, CoeffError> {
        Ok(PolyRule {
            explicit: self.explicit.to_backend(backend)?,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    Ok(RuleTerm {
                        outer: t.outer.to_backend(backend)?,
                        integrand: t.integrand.to_backend(backend)?,
                    })
                })
                .collect::<Result<_, CoeffError>>()?,
        })
    }

    /// `explicit + outer*int(integrand, s=a..t) + ...`.
    pub fn render(&self, lower: &Coefficient) -> String {
        let mut parts = Vec::new();
        if !self.explicit.is_zero() || self.terms.is_empty() {
            parts.push(self.explicit.to_string());
        }
        for t in &self.terms {
            let integral = format!("int({}, s={}..t)", t.integrand, lower);
            parts.push(if t.outer.as_constant().is_some_and(|c| c.is_one()) {
                integral
            } else if t.outer.len() == 1 {
                format!("{}*{integral}", t.outer)
            } else {
                format!("({})*{integral}", t.outer)
            });
        }
        parts.join(" + ")
    }
}

impl AugmentedSystem {
    /// Number of components: `y` plus the auxiliaries.
    pub fn arity(&self) -> usize {
        1 + self.variables.len()
    }

    pub fn rules(&self) -> impl Iterator<Item = &PolyRule> {
        std::iter::once(&self.y_rule).chain(self.v_rules.iter())
    }

    /// Initial values in component order.
    pub fn initial_values(&self) -> Vec<Coefficient> {
        std::iter::once(self.y0.clone())
            .chain(self.variables.iter().map(|v| v.initial.clone()))
            .collect()
    }

    pub fn is_rational(&self) -> bool {
        self.rules().flat_map(|r| r.polys()).all(|p| p.is_rational())
            && self.initial_values().iter().all(|c| c.as_rational().is_some())
            && self.y_prime.as_ref().is_none_or(|p| p.is_rational())
    }

    /// The same system with every coefficient moved to `backend`.
    pub fn to_backend(&self, backend: Backend) -> Result<AugmentedSystem, PolyError> {
        if backend == Backend::Rational {
            if let Some(v) = self.variables.iter().find(|v| v.initial.as_rational().is_none()) {
                return Err(PolyError::Irrational(format!(
                    "v{}({}) = {}",
                    v.index,
                    self.point_text(),
                    v.definition.display_in_t()
                )));
            }
            if !self.is_rational() {
                return Err(PolyError::Irrational("a system coefficient".into()));
            }
        }
        let conv = |p: &Polynomial| p.to_backend(backend);
        Ok(AugmentedSystem {
            label: self.label.clone(),
            variables: self
                .variables
                .iter()
                .map(|v| {
                    Ok(AuxVariable {
                        initial: v.initial.to_backend(backend)?,
                        rhs: conv(&v.rhs)?,
                        ..v.clone()
                    })
                })
                .collect::<Result<_, CoeffError>>()?,
            y_rule: self.y_rule.to_backend(backend)?,
            v_rules: self
                .v_rules
                .iter()
                .map(|r| r.to_backend(backend))
                .collect::<Result<_, _>>()?,
            y0: self.y0.to_backend(backend)?,
            a: self.a.to_backend(backend)?,
            backend,
            y_prime: self.y_prime.as_ref().map(conv).transpose()?,
            y_prime_note: self.y_prime_note.clone(),
            config: self.config.clone(),
        })
    }

    /// Rewrites an expression in `t` and `y` over this system's variables.
    pub fn to_polynomial(&self, e: &Expr) -> Result<Polynomial, PolyError> {
        let mut b = Builder::from_table(self.config.clone(), &self.variables);
        b.lower(&e.rename(Var::S, Var::T))
    }

    /// The expansion point, exact even in the float backend.
    pub fn point_text(&self) -> String {
        Coefficient::Rational(self.a.to_rational()).to_string()
    }

    pub fn render_text(&self) -> String {
        let point = Coefficient::Rational(self.a.to_rational());
        let mut out = String::new();
        let _ = writeln!(out, "system: {}", self.label);
        let _ = writeln!(out, "backend: {}", self.backend);
        let _ = writeln!(out, "y({point}) = {}", render_value(&self.y0));
        if self.variables.is_empty() {
            let _ = writeln!(out, "no auxiliary variables required");
        }
        for v in &self.variables {
            let _ = writeln!(
                out,
                "v{} := {}, v{}({}) = {}, v{}' = {}",
                v.index,
                v.definition.display_in_t(),
                v.index,
                point,
                render_value(&v.initial),
                v.index,
                v.rhs
            );
        }
        match (&self.y_prime, &self.y_prime_note) {
            (Some(p), _) => {
                let _ = writeln!(out, "y' = {p}");
            }
            (None, Some(note)) => {
                let _ = writeln!(out, "y' unavailable: {note}");
            }
            _ => {}
        }
        let _ = writeln!(out, "rules:");
        let _ = writeln!(out, "  y = {}", self.y_rule.render(&point));
        for (v, r) in self.variables.iter().zip(&self.v_rules) {
            let _ = writeln!(out, "  v{} = {}", v.index, r.render(&point));
        }
        out
    }

    pub fn to_record(&self) -> SystemRecord {
        let rule = |r: &PolyRule| RuleRecord {
            explicit: r.explicit.to_string(),
            terms: r
                .terms
                .iter()
                .map(|t| TermRecord {
                    outer: t.outer.to_string(),
                    integrand: t.integrand.to_string(),
                })
                .collect(),
        };
        SystemRecord {
            label: self.label.clone(),
            backend: self.backend.name().to_string(),
            digits: self.backend.digits(),
            point: self.point_text(),
            y0: render_value(&self.y0),
            variables: self
                .variables
                .iter()
                .map(|v| VariableRecord {
                    name: format!("v{}", v.index),
                    kind: v.kind.name().to_string(),
                    definition: v.definition.display_in_t().to_string(),
                    initial: render_value(&v.initial),
                    rhs: v.rhs.to_string(),
                })
                .collect(),
            y_prime: self.y_prime.as_ref().map(|p| p.to_string()),
            y_rule: rule(&self.y_rule),
            v_rules: self.v_rules.iter().map(rule).collect(),
        }
    }
}

fn render_value(c: &Coefficient) -> String {
    match c {
        Coefficient::Rational(_) => c.to_string(),
        Coefficient::Float(f) if f.to_rational().is_integer() => f.to_rational().to_integer().to_string(),
        Coefficient::Float(f) => c.to_scientific(f.digits() as usize),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub label: String,
    pub backend: String,
    pub digits: Option<u32>,
    pub point: String,
    pub y0: String,
    pub variables: Vec<VariableRecord>,
    pub y_prime: Option<String>,
    pub y_rule: RuleRecord,
    pub v_rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableRecord {
    pub name: String,
    pub kind: String,
    pub definition: String,
    pub initial: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub explicit: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub outer: String,
    pub integrand: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const EX1: &str = "y(t) = exp(t)*sin(t) + (2+cos(t))*int(y(s)/(2+cos(s)), s=0..t)";
    const EX2: &str = "y(t) = 1/2*sin(2*t) + int(3/2*y(s)^2*cos(s-t), s=0..t)";
    const EX3: &str = "y(t) = tan(t) - 1/4*sin(2*t) - 1/2*t + int(1/(1+y(s)^2), s=0..t)";
    const EX4: &str = "y(t) = 1 - int(sin(y(s)), s=0..t)";

    fn system(text: &str) -> AugmentedSystem {
        assemble(&parse(text).unwrap(), &PolyConfig::default()).unwrap()
    }

    fn roster(sys: &AugmentedSystem) -> Vec<String> {
        sys.variables
            .iter()
            .map(|v| format!("{} | {}", v.definition.display_in_t(), v.rhs))
            .collect()
    }

    #[test]
    fn shifted_cosine_system() {
        let sys = system(EX1);
        assert_eq!(
            roster(&sys),
            [
                "exp(t) | v1",
                "sin(t) | v3",
                "cos(t) | -v2",
                "2+cos(t) | -v2",
                "1/(2+cos(t)) | v2*v5^2",
            ]
        );
        assert_eq!(sys.backend, Backend::Rational);
        let init: Vec<String> = sys.initial_values().iter().map(|c| c.to_string()).collect();
        assert_eq!(init, ["0", "1", "0", "1", "3", "1/3"]);
        assert_eq!(sys.y_rule.explicit.to_string(), "v1*v2");
        assert_eq!(sys.y_rule.terms.len(), 1);
        assert_eq!(sys.y_rule.terms[0].outer.to_string(), "v4");
        assert_eq!(sys.y_rule.terms[0].integrand.to_string(), "y*v5");
        assert!(sys.y_prime.is_none());
    }

    #[test]
    fn difference_kernel_system() {
        let sys = system(EX2);
        assert_eq!(roster(&sys), ["sin(t) | v2", "cos(t) | -v1"]);
        assert_eq!(sys.y_rule.explicit.to_string(), "v1*v2");
        let terms: Vec<String> = sys
            .y_rule
            .terms
            .iter()
            .map(|t| format!("{} * {}", t.outer, t.integrand))
            .collect();
        assert_eq!(terms, ["v2 * 3/2*y^2*v2", "v1 * 3/2*y^2*v1"]);
        let init: Vec<String> = sys.initial_values().iter().map(|c| c.to_string()).collect();
        assert_eq!(init, ["0", "0", "1"]);
    }

    #[test]
    fn tangent_system() {
        let sys = system(EX3);
        let defs: Vec<String> = sys
            .variables
            .iter()
            .map(|v| v.definition.display_in_t().to_string())
            .collect();
        assert_eq!(defs, ["sin(t)", "cos(t)", "1/cos(t)", "1+y^2", "1/(1+y^2)"]);
        assert_eq!(sys.variables[2].rhs.to_string(), "v1*v3^2");
        assert_eq!(sys.y_rule.explicit.to_string(), "-1/2*v1*v2 + v1*v3 - 1/2*t");
        assert_eq!(sys.y_rule.terms[0].integrand.to_string(), "v5");
        assert!(sys.y_prime.is_some());
        assert_eq!(sys.backend, Backend::Rational);
    }

    #[test]
    fn sine_of_unknown() {
        let sys = system(EX4);
        assert_eq!(roster(&sys), ["sin(y) | -v1*v2", "cos(y) | v1^2"]);
        assert_eq!(sys.y_prime.as_ref().unwrap().to_string(), "-v1");
        assert_eq!(sys.backend, Backend::Float { digits: 64 });
        assert_eq!(sys.variables[0].initial.round_to_places(5), "0.84147");
        assert_eq!(sys.variables[1].initial.round_to_places(5), "0.54030");
    }

    #[test]
    fn polynomial_input_needs_nothing() {
        let sys = system("y(t) = t + int(3/2*y(s)^2, s=0..t)");
        assert!(sys.variables.is_empty());
        assert!(sys.render_text().contains("no auxiliary variables required"));
        let sys = system("y(t) = 1");
        assert!(sys.y_rule.terms.is_empty());
        assert_eq!(sys.y_rule.explicit.to_string(), "1");
    }

    #[test]
    fn missing_y_prime_is_an_error() {
        let eq = parse("y(t) = 0 + t*int(sin(y(s)), s=0..t)").unwrap();
        assert!(matches!(
            assemble(&eq, &PolyConfig::default()),
            Err(PolyError::YPrimeUnavailable { .. })
        ));
    }

    #[test]
    fn caps() {
        let eq = parse("y(t) = exp(sin(t)) + int(y(s)^3, s=0..t)").unwrap();
        let tight = PolyConfig {
            max_vars: 2,
            ..PolyConfig::default()
        };
        assert!(matches!(assemble(&eq, &tight), Err(PolyError::TooManyVariables(2))));
        let eq = parse("y(t) = int(y(s)^17, s=0..t)").unwrap();
        assert!(matches!(
            assemble(&eq, &PolyConfig::default()),
            Err(PolyError::DegreeCap { .. })
        ));
    }

    #[test]
    fn forced_rational_rejects_irrational_data() {
        let eq = parse(EX4).unwrap();
        let cfg = PolyConfig {
            backend: Some(Backend::Rational),
            ..PolyConfig::default()
        };
        assert!(matches!(assemble(&eq, &cfg), Err(PolyError::Irrational(_))));
    }

    #[test]
    fn to_polynomial_uses_the_table() {
        let sys = system(EX3);
        let p = sys
            .to_polynomial(&crate::expr::parse_expr("sin(t)*tan(t)").unwrap())
            .unwrap();
        assert_eq!(p.to_string(), "v1^2*v3");
        assert!(matches!(
            sys.to_polynomial(&crate::expr::parse_expr("exp(t)").unwrap()),
            Err(PolyError::Untabled(_))
        ));
        assert_eq!(sys.to_polynomial(&Expr::int(1)).unwrap(), Polynomial::one());
    }

    #[test]
    fn deterministic_roster() {
        assert_eq!(system(EX1).render_text(), system(EX1).render_text());
    }
}
