//! Sparse multivariate polynomials over the system variables `y, v1..vr, t`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coeff::{Backend, CoeffError, Coefficient};
use crate::series::{Series, SeriesError};

/// A variable of the augmented system. `Aux(j)` is `v_j`, 1-based, which is
/// also its component index in an iteration state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SysVar {
    Y,
    Aux(usize),
    /// The independent variable, whose series is known exactly.
    T,
}

impl SysVar {
    pub fn name(self) -> String {
        match self {
            SysVar::Y => "y".to_string(),
            SysVar::Aux(j) => format!("v{j}"),
            SysVar::T => "t".to_string(),
        }
    }
}

impl fmt::Display for SysVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Exponents keyed by variable; absent means zero.
pub type Monomial = BTreeMap<SysVar, u32>;

fn degree_of(m: &Monomial) -> u32 {
    m.values().sum()
}

/// Brings two coefficients to a shared backend without failing: a rational
/// meeting a float becomes a float at the float's precision.
fn lift(a: &Coefficient, b: &Coefficient) -> (Coefficient, Coefficient) {
    match (a.backend().digits(), b.backend().digits()) {
        (None, None) => (a.clone(), b.clone()),
        (da, db) => {
            let d = da.unwrap_or(0).max(db.unwrap_or(0));
            let up = |c: &Coefficient| c.promote(d).expect("float precision already validated");
            (up(a), up(b))
        }
    }
}

fn add_c(a: &Coefficient, b: &Coefficient) -> Coefficient {
    let (a, b) = lift(a, b);
    &a + &b
}

fn mul_c(a: &Coefficient, b: &Coefficient) -> Coefficient {
    let (a, b) = lift(a, b);
    &a * &b
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: Coefficient) -> Polynomial {
        let mut p = Polynomial::zero();
        p.insert(Monomial::new(), c);
        p
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Coefficient::from(1))
    }

    pub fn var(v: SysVar) -> Polynomial {
        let mut m = Monomial::new();
        m.insert(v, 1);
        let mut p = Polynomial::zero();
        p.insert(m, Coefficient::from(1));
        p
    }

    fn insert(&mut self, m: Monomial, c: Coefficient) {
        let sum = match self.terms.remove(&m) {
            Some(old) => add_c(&old, &c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(degree_of).max().unwrap_or(0)
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::from(0)),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    /// `Some(x)` when the polynomial is exactly `x`.
    pub fn as_single_var(&self) -> Option<SysVar> {
        let (m, c) = self.terms.iter().next()?;
        if self.terms.len() != 1 || !c.is_one() || m.len() != 1 {
            return None;
        }
        let (v, e) = m.iter().next()?;
        (*e == 1).then_some(*v)
    }

    pub fn contains(&self, v: SysVar) -> bool {
        self.terms.keys().any(|m| m.contains_key(&v))
    }

    pub fn vars(&self) -> Vec<SysVar> {
        let mut out: Vec<SysVar> = self.terms.keys().flat_map(|m| m.keys().copied()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coefficient) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), mul_c(c, k));
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    *m.entry(*v).or_insert(0) += e;
                }
                out.insert(m, mul_c(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to `v`.
    pub fn partial(&self, v: SysVar) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let Some(&e) = m.get(&v) else { continue };
            let mut m = m.clone();
            if e == 1 {
                m.remove(&v);
            } else {
                m.insert(v, e - 1);
            }
            out.insert(m, mul_c(c, &Coefficient::from(i64::from(e))));
        }
        out
    }

    /// Total derivative `sum_x dP/dx * x'`, with `x'` supplied by `deriv`.
    pub fn derivation<E>(&self, mut deriv: impl FnMut(SysVar) -> Result<Polynomial, E>) -> Result<Polynomial, E> {
        let mut out = Polynomial::zero();
        for v in self.vars() {
            let dv = deriv(v)?;
            if dv.is_zero() {
                continue;
            }
            out = out.add(&self.partial(v).mul(&dv));
        }
        Ok(out)
    }

    /// Replaces each variable by a polynomial.
    pub fn substitute(&self, sub: &impl Fn(SysVar) -> Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for (v, e) in m {
                term = term.mul(&sub(*v).pow(*e));
            }
            out = out.add(&term);
        }
        out
    }

    /// Numeric value at the given variable values, mixing backends as needed.
    pub fn eval(&self, value: &impl Fn(SysVar) -> Coefficient) -> Coefficient {
        let mut acc = Coefficient::from(0);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m {
                term = mul_c(&term, &value(*v).pow(*e));
            }
            acc = add_c(&acc, &term);
        }
        acc
    }

    /// Whether every coefficient is rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some())
    }

    pub fn to_backend(&self, backend: Backend) -> Result<Polynomial, CoeffError> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.to_backend(backend)?);
        }
        Ok(out)
    }

    /// Series value with `env` supplying each variable's series.
    pub fn eval_series(&self, env: &mut SeriesEnv<'_>) -> Result<Series, SeriesError> {
        let mut acc = Series::zero(env.point().clone(), env.order());
        for (m, c) in &self.terms {
            let mut term: Option<Series> = None;
            for (v, e) in m {
                let p = env.power(*v, *e)?;
                term = Some(match term {
                    None => p,
                    Some(t) => t.mul(&p)?,
                });
            }
            let term = match term {
                None => Series::constant(c.clone(), env.point().clone(), env.order())?,
                Some(t) if c.is_one() => t,
                Some(t) => t.scale(c)?,
            };
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    fn display_order(&self) -> Vec<(&Monomial, &Coefficient)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        // higher degree first, constants last; ties in variable order
        v.sort_by(|a, b| {
            let ka = (degree_of(a.0) == 0, std::cmp::Reverse(degree_of(a.0)));
            let kb = (degree_of(b.0) == 0, std::cmp::Reverse(degree_of(b.0)));
            ka.cmp(&kb).then_with(|| a.0.cmp(b.0))
        });
        v
    }
}

fn render_coeff(c: &Coefficient) -> String {
    match c {
        Coefficient::Rational(_) => c.to_string(),
        // integral floats print exactly, like the rational form
        Coefficient::Float(f) if f.to_rational().is_integer() => f.to_rational().to_integer().to_string(),
        Coefficient::Float(_) => c.to_scientific(20),
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.display_order().into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let vars: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { v.name() } else { format!("{v}^{e}") })
                .collect();
            if vars.is_empty() {
                f.write_str(&render_coeff(&mag))?;
            } else if mag.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", render_coeff(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Variable series for polynomial evaluation, with a cache of powers.
pub struct SeriesEnv<'a> {
    components: &'a [Series],
    t: Series,
    cache: HashMap<(SysVar, u32), Series>,
}

impl<'a> SeriesEnv<'a> {
    /// `components[0]` is `y`, `components[j]` is `v_j`.
    pub fn new(components: &'a [Series]) -> SeriesEnv<'a> {
        let first = &components[0];
        SeriesEnv {
            t: Series::identity(first.point().clone(), first.order()),
            components,
            cache: HashMap::new(),
        }
    }

    fn point(&self) -> &Coefficient {
        self.t.point()
    }

    fn order(&self) -> usize {
        self.t.order()
    }

    fn base(&self, v: SysVar) -> &Series {
        match v {
            SysVar::Y => &self.components[0],
            SysVar::Aux(j) => &self.components[j],
            SysVar::T => &self.t,
        }
    }

    pub fn power(&mut self, v: SysVar, e: u32) -> Result<Series, SeriesError> {
        if e == 1 {
            return Ok(self.base(v).clone());
        }
        if let Some(s) = self.cache.get(&(v, e)) {
            return Ok(s.clone());
        }
        let lower = self.power(v, e - 1)?;
        let s = lower.mul(self.base(v))?;
        self.cache.insert((v, e), s.clone());
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(j: usize) -> Polynomial {
        Polynomial::var(SysVar::Aux(j))
    }

    #[test]
    fn ring_operations_and_display() {
        let p = v(1).mul(&v(3)).sub(&v(1).mul(&v(2)).scale(&Coefficient::ratio(1, 2)));
        let p = p.sub(&Polynomial::var(SysVar::T).scale(&Coefficient::ratio(1, 2)));
        assert_eq!(p.to_string(), "-1/2*v1*v2 + v1*v3 - 1/2*t");
        assert_eq!(p.degree(), 2);
        let q = v(1).add(&Polynomial::one()).pow(2);
        assert_eq!(q.to_string(), "v1^2 + 2*v1 + 1");
        assert!(v(1).sub(&v(1)).is_zero());
        assert_eq!(v(2).as_single_var(), Some(SysVar::Aux(2)));
        assert_eq!(v(2).scale(&Coefficient::from(2)).as_single_var(), None);
    }

    #[test]
    fn partials_and_derivation() {
        // d/dt (v1 v2) with v1' = v2, v2' = -v1
        let p = v(1).mul(&v(2));
        let d = p
            .derivation(|x| -> Result<Polynomial, ()> {
                Ok(match x {
                    SysVar::Aux(1) => v(2),
                    SysVar::Aux(2) => v(1).neg(),
                    _ => Polynomial::zero(),
                })
            })
            .unwrap();
        assert_eq!(d.to_string(), "-v1^2 + v2^2");
        assert_eq!(v(1).pow(3).partial(SysVar::Aux(1)).to_string(), "3*v1^2");
    }

    #[test]
    fn mixed_backends_lift_to_float() {
        let f = Coefficient::ratio(1, 3).promote(40).unwrap();
        let p = v(1).scale(&f).add(&Polynomial::constant(Coefficient::from(1)));
        assert!(!p.is_rational());
        let x = p.eval(&|_| Coefficient::from(3));
        assert_eq!(x.round_to_places(30), format!("2.{}", "0".repeat(30)));
    }

    #[test]
    fn series_evaluation() {
        let a = Coefficient::from(0);
        let y = Series::new(a.clone(), vec![1.into(), 1.into(), 0.into(), 0.into()]).unwrap();
        let comps = vec![y];
        let mut env = SeriesEnv::new(&comps);
        // y^2 + t = 1 + 3t + t^2
        let p = Polynomial::var(SysVar::Y).pow(2).add(&Polynomial::var(SysVar::T));
        let s = p.eval_series(&mut env).unwrap();
        let want: Vec<Coefficient> = vec![1.into(), 3.into(), 1.into(), 0.into()];
        assert_eq!(s.coeffs(), &want[..]);
    }
}
