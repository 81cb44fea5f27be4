//! Scalar coefficients for truncated series.
//!
//! Two backends share one enum: exact rationals (always in lowest terms, positive
//! denominator) and binary big floats carrying a decimal precision. Mixed-backend
//! arithmetic is an error unless the caller asks for promotion explicitly.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Smallest decimal precision accepted by the float backend.
pub const MIN_DIGITS: u32 = 32;
/// Float precision used when none is configured.
pub const DEFAULT_DIGITS: u32 = 64;

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("backend mismatch: {left} vs {right}")]
    BackendMismatch { left: Backend, right: Backend },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func}: argument outside the domain ({detail})")]
    Domain { func: &'static str, detail: String },
    #[error("float precision must be at least {MIN_DIGITS} digits, got {0}")]
    Precision(u32),
    #[error("cannot parse number `{0}`")]
    Parse(String),
    #[error("float value is not finite")]
    NotFinite,
}

/// Which scalar field a coefficient lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    Float { digits: u32 },
}

impl Backend {
    pub fn float(digits: u32) -> Result<Self, CoeffError> {
        if digits < MIN_DIGITS {
            return Err(CoeffError::Precision(digits));
        }
        Ok(Backend::Float { digits })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float { .. } => "float",
        }
    }

    pub fn digits(&self) -> Option<u32> {
        match self {
            Backend::Rational => None,
            Backend::Float { digits } => Some(*digits),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float { digits } => write!(f, "float({digits})"),
        }
    }
}

/// Elementary transcendental functions known to the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Arccot,
    Cot,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Arccot,
        Func::Cot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Arccot => "arccot",
            Func::Cot => "cot",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A big float tagged with the decimal precision it was rounded to.
#[derive(Debug, Clone)]
pub struct Float {
    value: BigFloat,
    digits: u32,
}

/// Number of mantissa bits carrying `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> usize {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as usize
}

fn bigint_to_bigfloat_exact(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let (sign, words) = n.to_u64_digits();
    let sign = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, sign, (words.len() * 64) as i32)
}

fn rational_to_bigfloat(q: &BigRational, bits: usize) -> BigFloat {
    if q.is_zero() {
        return BigFloat::from_word(0, bits.max(64));
    }
    let n = bigint_to_bigfloat_exact(q.numer());
    let d = bigint_to_bigfloat_exact(q.denom());
    n.div(&d, bits.max(64), RM)
}

fn bigfloat_to_rational(f: &BigFloat) -> Result<BigRational, CoeffError> {
    if f.is_zero() {
        return Ok(BigRational::zero());
    }
    let (words, _, sign, exponent, _) = f.as_raw_parts().ok_or(CoeffError::NotFinite)?;
    let mantissa = words
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, w| (acc << 64u32) + BigUint::from(*w));
    let mut value = BigInt::from(mantissa);
    if sign == Sign::Neg {
        value = -value;
    }
    let shift = i64::from(exponent) - (words.len() as i64) * 64;
    let q = if shift >= 0 {
        BigRational::from_integer(value << (shift as usize))
    } else {
        BigRational::new(value, BigInt::one() << ((-shift) as usize))
    };
    Ok(q)
}

impl Float {
    fn bits(&self) -> usize {
        digits_to_bits(self.digits)
    }

    fn wrap(value: BigFloat, digits: u32) -> Result<Float, CoeffError> {
        if value.is_nan() || value.is_inf() {
            return Err(CoeffError::NotFinite);
        }
        Ok(Float { value, digits })
    }

    pub fn from_rational(q: &BigRational, digits: u32) -> Float {
        Float {
            value: rational_to_bigfloat(q, digits_to_bits(digits)),
            digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn to_rational(&self) -> BigRational {
        bigfloat_to_rational(&self.value).expect("finite by construction")
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn with_digits(&self, digits: u32) -> Float {
        let mut value = self.value.clone();
        value
            .set_precision(digits_to_bits(digits).max(64), RM)
            .expect("finite value");
        Float { value, digits }
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.digits == other.digits && self.value.cmp(&other.value) == Some(0)
    }
}

/// A series coefficient in one of the two backends.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Rational(BigRational),
    Float(Float),
}

impl From<BigRational> for Coefficient {
    fn from(q: BigRational) -> Self {
        Coefficient::Rational(q)
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::Rational(BigRational::from_integer(n.into()))
    }
}

impl Coefficient {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Coefficient::Rational(BigRational::new(numer.into(), denom.into()))
    }

    /// Constructs `q` in the given backend (rounding when the backend is float).
    pub fn from_rational(q: BigRational, backend: Backend) -> Self {
        match backend {
            Backend::Rational => Coefficient::Rational(q),
            Backend::Float { digits } => Coefficient::Float(Float::from_rational(&q, digits)),
        }
    }

    pub fn int(n: i64, backend: Backend) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()), backend)
    }

    pub fn zero(backend: Backend) -> Self {
        Self::int(0, backend)
    }

    pub fn one(backend: Backend) -> Self {
        Self::int(1, backend)
    }

    pub fn backend(&self) -> Backend {
        match self {
            Coefficient::Rational(_) => Backend::Rational,
            Coefficient::Float(f) => Backend::Float { digits: f.digits },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_zero(),
            Coefficient::Float(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_one(),
            Coefficient::Float(f) => f.to_rational().is_one(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coefficient::Rational(q) => Some(q),
            Coefficient::Float(_) => None,
        }
    }

    /// Exact rational value of the coefficient (floats are dyadic rationals).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coefficient::Rational(q) => q.clone(),
            Coefficient::Float(f) => f.to_rational(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.to_rational();
        q.to_f64().unwrap_or(f64::NAN)
    }

    /// Rounds into the float backend at `digits`. Floats are re-rounded.
    pub fn promote(&self, digits: u32) -> Result<Coefficient, CoeffError> {
        if digits < MIN_DIGITS {
            return Err(CoeffError::Precision(digits));
        }
        Ok(match self {
            Coefficient::Rational(q) => Coefficient::Float(Float::from_rational(q, digits)),
            Coefficient::Float(f) if f.digits == digits => self.clone(),
            Coefficient::Float(f) => Coefficient::Float(f.with_digits(digits)),
        })
    }

    /// Moves the value into `backend`. Demoting a float to rational is refused.
    pub fn to_backend(&self, backend: Backend) -> Result<Coefficient, CoeffError> {
        match (self, backend) {
            (Coefficient::Rational(_), Backend::Rational) => Ok(self.clone()),
            (_, Backend::Float { digits }) => self.promote(digits),
            (Coefficient::Float(_), Backend::Rational) => Err(CoeffError::BackendMismatch {
                left: self.backend(),
                right: backend,
            }),
        }
    }

    fn mismatch(&self, other: &Coefficient) -> CoeffError {
        CoeffError::BackendMismatch {
            left: self.backend(),
            right: other.backend(),
        }
    }

    fn binary(
        &self,
        other: &Coefficient,
        rat: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        flt: impl FnOnce(&BigFloat, &BigFloat, usize) -> BigFloat,
    ) -> Result<Coefficient, CoeffError> {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Ok(Coefficient::Rational(rat(a, b))),
            (Coefficient::Float(a), Coefficient::Float(b)) if a.digits == b.digits => {
                let v = flt(&a.value, &b.value, a.bits());
                Ok(Coefficient::Float(Float::wrap(v, a.digits)?))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn try_add(&self, other: &Coefficient) -> Result<Coefficient, CoeffError> {
        self.binary(other, |a, b| a + b, |a, b, p| a.add(b, p, RM))
    }

    pub fn try_sub(&self, other: &Coefficient) -> Result<Coefficient, CoeffError> {
        self.binary(other, |a, b| a - b, |a, b, p| a.sub(b, p, RM))
    }

    pub fn try_mul(&self, other: &Coefficient) -> Result<Coefficient, CoeffError> {
        self.binary(other, |a, b| a * b, |a, b, p| a.mul(b, p, RM))
    }

    pub fn try_div(&self, other: &Coefficient) -> Result<Coefficient, CoeffError> {
        if self.backend() != other.backend() {
            return Err(self.mismatch(other));
        }
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        self.binary(other, |a, b| a / b, |a, b, p| a.div(b, p, RM))
    }

    /// Brings both operands to a common backend, promoting rationals to float
    /// at `digits` when either side is a float.
    pub fn unify(&self, other: &Coefficient, digits: u32) -> Result<(Coefficient, Coefficient), CoeffError> {
        match (self, other) {
            (Coefficient::Rational(_), Coefficient::Rational(_)) => Ok((self.clone(), other.clone())),
            _ => Ok((self.promote(digits)?, other.promote(digits)?)),
        }
    }

    pub fn abs(&self) -> Coefficient {
        match self {
            Coefficient::Rational(q) => Coefficient::Rational(q.abs()),
            Coefficient::Float(f) => Coefficient::Float(Float {
                value: f.value.abs(),
                digits: f.digits,
            }),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coefficient::Rational(q) => q.is_negative(),
            Coefficient::Float(f) => f.value.is_negative() && !f.value.is_zero(),
        }
    }

    /// Compares the represented values regardless of backend.
    pub fn cmp_value(&self, other: &Coefficient) -> Ordering {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a.cmp(b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }

    pub fn pow(&self, exp: u32) -> Coefficient {
        let mut acc = Coefficient::one(self.backend());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates `func` at `self`, staying exact where the value is rational
    /// (`sin 0`, `cos 0`, `tan 0`, `exp 0`, `ln 1`) and falling back to the
    /// float backend at `digits` otherwise.
    pub fn apply(&self, func: Func, digits: u32) -> Result<Coefficient, CoeffError> {
        if let Coefficient::Rational(q) = self {
            let exact = match func {
                Func::Sin | Func::Tan if q.is_zero() => Some(0),
                Func::Cos | Func::Exp if q.is_zero() => Some(1),
                Func::Ln if q.is_one() => Some(0),
                _ => None,
            };
            if let Some(v) = exact {
                return Ok(Coefficient::from(v));
            }
        }
        let digits = match self {
            Coefficient::Float(f) => f.digits,
            Coefficient::Rational(_) => digits,
        };
        transcendental_constant(func, self, digits)
    }

    /// Parses a decimal literal (`-1.25`, `3e-2`) or a ratio `num/den`.
    pub fn parse(text: &str, backend: Backend) -> Result<Coefficient, CoeffError> {
        let q = parse_rational(text)?;
        Ok(Coefficient::from_rational(q, backend))
    }

    /// Round half away from zero to `places` decimals.
    pub fn round_to_places(&self, places: usize) -> String {
        round_half_away(&self.to_rational(), places)
    }

    /// Scientific rendering with `sig` significant digits.
    pub fn to_scientific(&self, sig: usize) -> String {
        scientific(&self.to_rational(), sig)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Coefficient::Float(v) => f.write_str(&scientific(&v.to_rational(), v.digits as usize)),
        }
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        /// Panics on backend mismatch; use the `try_` form where the backends are
        /// not already known to agree.
        impl $trait<&Coefficient> for &Coefficient {
            type Output = Coefficient;
            fn $method(self, rhs: &Coefficient) -> Coefficient {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);
forward_op!(Div, div, try_div);

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Rational(q) => Coefficient::Rational(-q),
            Coefficient::Float(f) => Coefficient::Float(Float {
                value: f.value.clone().neg(),
                digits: f.digits,
            }),
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

/// Evaluates `func(argument)` in the float backend, rounded to `digits`.
pub fn transcendental_constant(func: Func, argument: &Coefficient, digits: u32) -> Result<Coefficient, CoeffError> {
    if digits < MIN_DIGITS {
        return Err(CoeffError::Precision(digits));
    }
    let bits = digits_to_bits(digits);
    let wide = bits + GUARD_BITS;
    let x = match argument {
        Coefficient::Rational(q) => rational_to_bigfloat(q, wide),
        Coefficient::Float(f) => {
            let mut v = f.value.clone();
            v.set_precision(wide.max(v.mantissa_max_bit_len().unwrap_or(0)), RM)
                .map_err(|_| CoeffError::NotFinite)?;
            v
        }
    };
    let domain = |detail: &str| CoeffError::Domain {
        func: func.name(),
        detail: detail.to_string(),
    };
    let value = CONSTS.with(|cc| {
        let cc = &mut *cc.borrow_mut();
        match func {
            Func::Sin => Ok(x.sin(wide, RM, cc)),
            Func::Cos => Ok(x.cos(wide, RM, cc)),
            Func::Tan => {
                let c = x.cos(wide, RM, cc);
                if c.is_zero() {
                    return Err(domain("cos vanishes"));
                }
                Ok(x.sin(wide, RM, cc).div(&c, wide, RM))
            }
            Func::Exp => Ok(x.exp(wide, RM, cc)),
            Func::Ln => {
                if x.is_zero() || x.is_negative() {
                    return Err(domain("non-positive argument"));
                }
                Ok(x.ln(wide, RM, cc))
            }
            Func::Cot => {
                let s = x.sin(wide, RM, cc);
                if s.is_zero() {
                    return Err(domain("sin vanishes"));
                }
                Ok(x.cos(wide, RM, cc).div(&s, wide, RM))
            }
            Func::Arccot => {
                // range (0, pi): arccot x = pi/2 - atan x
                let half_pi = cc.pi(wide, RM).div(&BigFloat::from_word(2, 64), wide, RM);
                Ok(half_pi.sub(&x.atan(wide, RM, cc), wide, RM))
            }
        }
    })?;
    let mut value = value;
    value
        .set_precision(bits.max(64), RM)
        .map_err(|_| CoeffError::NotFinite)?;
    Ok(Coefficient::Float(Float::wrap(value, digits)?))
}

/// Exact parse of a decimal literal or `num/den` ratio.
pub fn parse_rational(text: &str) -> Result<BigRational, CoeffError> {
    let err = || CoeffError::Parse(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

fn round_half_away(q: &BigRational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let half = BigRational::new(1.into(), 2.into());
    let n = (scaled + half).floor().to_integer();
    let (int_part, frac_part) = n.div_rem(&scale);
    let sign = if q.is_negative() && !n.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = places)
}

fn scientific(q: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if q.is_zero() {
        return format!("0.{}e0", "0".repeat(sig - 1));
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    // decimal exponent e with 10^e <= a < 10^(e+1)
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(BigInt::from(10), k as usize))
        } else {
            BigRational::new(1.into(), num_traits::pow(BigInt::from(10), (-k) as usize))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let scaled = &a / pow10(e) * pow10(sig as i64 - 1);
    let half = BigRational::new(1.into(), 2.into());
    let mut n = (scaled + half).floor().to_integer();
    if n >= num_traits::pow(BigInt::from(10), sig) {
        n /= 10;
        e += 1;
    }
    let digits = n.to_string();
    let (lead, rest) = digits.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{e}")
    } else {
        format!("{sign}{lead}.{rest}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Coefficient {
        Coefficient::ratio(n, d)
    }

    #[test]
    fn rational_add_reduces() {
        assert_eq!(&q(1, 3) + &q(1, 6), q(1, 2));
        let x = q(7, 5);
        assert_eq!(&x + &Coefficient::from(0), x);
    }

    #[test]
    fn rational_mul_div() {
        assert_eq!(&q(2, 3) * &q(3, 4), q(1, 2));
        let x = q(-9, 4);
        assert_eq!(&x * &Coefficient::from(1), x);
        let third = &Coefficient::from(1) / &Coefficient::from(3);
        assert_eq!(third.as_rational().unwrap().denom(), &BigInt::from(3));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(q(1, 2).try_div(&Coefficient::from(0)), Err(CoeffError::DivisionByZero));
        let z = Coefficient::zero(Backend::Float { digits: 40 });
        let one = Coefficient::one(Backend::Float { digits: 40 });
        assert_eq!(one.try_div(&z), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn mixing_backends_requires_promotion() {
        let f = Coefficient::one(Backend::Float { digits: 40 });
        let r = q(1, 3);
        assert!(matches!(r.try_add(&f), Err(CoeffError::BackendMismatch { .. })));
        let (a, b) = r.unify(&f, 40).unwrap();
        let sum = a.try_add(&b).unwrap();
        assert_eq!(sum.backend(), Backend::Float { digits: 40 });
        assert_eq!(sum.round_to_places(10), "1.3333333333");
    }

    #[test]
    fn float_precision_floor() {
        assert_eq!(Backend::float(16), Err(CoeffError::Precision(16)));
        assert!(q(1, 3).promote(31).is_err());
        assert!(transcendental_constant(Func::Sin, &q(1, 1), 20).is_err());
    }

    #[test]
    fn exact_shortcuts() {
        let zero = Coefficient::from(0);
        assert_eq!(zero.apply(Func::Cos, 40).unwrap(), Coefficient::from(1));
        assert_eq!(zero.apply(Func::Sin, 40).unwrap(), Coefficient::from(0));
        assert_eq!(zero.apply(Func::Exp, 40).unwrap(), Coefficient::from(1));
        assert_eq!(Coefficient::from(1).apply(Func::Ln, 40).unwrap(), Coefficient::from(0));
        assert!(Coefficient::from(1)
            .apply(Func::Sin, 40)
            .unwrap()
            .as_rational()
            .is_none());
    }

    #[test]
    fn transcendental_cos_zero_is_one() {
        let c = transcendental_constant(Func::Cos, &Coefficient::from(0), 40).unwrap();
        assert_eq!(c.round_to_places(30), format!("1.{}", "0".repeat(30)));
    }

    #[test]
    fn transcendental_domain_errors() {
        assert!(matches!(
            transcendental_constant(Func::Ln, &Coefficient::from(0), 40),
            Err(CoeffError::Domain { func: "ln", .. })
        ));
        assert!(matches!(
            transcendental_constant(Func::Ln, &q(-1, 2), 40),
            Err(CoeffError::Domain { .. })
        ));
        assert!(matches!(
            transcendental_constant(Func::Cot, &Coefficient::from(0), 40),
            Err(CoeffError::Domain { func: "cot", .. })
        ));
    }

    #[test]
    fn arccot_of_cot_half_is_half() {
        let c = transcendental_constant(Func::Cot, &q(1, 2), 50).unwrap();
        let back = transcendental_constant(Func::Arccot, &c, 50).unwrap();
        let diff = back.try_sub(&q(1, 2).promote(50).unwrap()).unwrap();
        assert!(diff.abs().to_f64() < 1e-45);
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert_eq!(parse_rational("2.5e-1").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("1/3").unwrap(), BigRational::new(1.into(), 3.into()));
        assert!(parse_rational("1..").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(q(1, 6).round_to_places(5), "0.16667");
        assert_eq!(Coefficient::from(0).round_to_places(5), "0.00000");
        assert_eq!(q(17, 315).round_to_places(5), "0.05397");
        assert_eq!(q(-1, 30).round_to_places(5), "-0.03333");
        assert_eq!(q(1, 200000).round_to_places(5), "0.00001");
        assert_eq!(q(-1, 200000).round_to_places(5), "-0.00001");
        assert_eq!(q(-1, 300000).round_to_places(5), "0.00000");
        assert_eq!(q(5, 2).round_to_places(0), "3");
    }

    #[test]
    fn display_forms() {
        assert_eq!(q(1, 3).to_string(), "1/3");
        assert_eq!(q(-4, 2).to_string(), "-2");
        assert_eq!(q(1, 8).to_scientific(3), "1.25e-1");
        assert_eq!(q(-999, 1).to_scientific(2), "-1.0e3");
        assert_eq!(Coefficient::from(0).to_scientific(3), "0.00e0");
    }

    #[test]
    fn float_round_trips_through_rational() {
        let x = q(1, 3).promote(40).unwrap();
        let back = x.to_rational();
        let err = (back - BigRational::new(1.into(), 3.into())).abs();
        assert!(err < BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 40)));
    }
}
