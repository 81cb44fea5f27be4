//! Truncated power series in the shifted variable `u = t - a`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{Backend, CoeffError, Coefficient};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series expansion points differ ({0} vs {1})")]
    PointMismatch(String, String),
    #[error("series backends differ ({0} vs {1})")]
    BackendMismatch(Backend, Backend),
    #[error("series orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// `sum_j coeffs[j] * (t - point)^j`, `j = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    point: Coefficient,
    coeffs: Vec<Coefficient>,
}

/// JSON-facing view of a series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub point: String,
    pub order: usize,
    pub backend: String,
    pub coeffs: Vec<String>,
}

impl Series {
    /// Builds a series from explicit coefficients; they must share the point's backend.
    pub fn new(point: Coefficient, coeffs: Vec<Coefficient>) -> Result<Series, SeriesError> {
        assert!(!coeffs.is_empty(), "a series carries at least c0");
        let backend = point.backend();
        if let Some(c) = coeffs.iter().find(|c| c.backend() != backend) {
            return Err(SeriesError::BackendMismatch(backend, c.backend()));
        }
        Ok(Series { point, coeffs })
    }

    pub fn constant(c: Coefficient, point: Coefficient, order: usize) -> Result<Series, SeriesError> {
        let zero = Coefficient::zero(point.backend());
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = c;
        Series::new(point, coeffs)
    }

    pub fn zero(point: Coefficient, order: usize) -> Series {
        let zero = Coefficient::zero(point.backend());
        Series {
            coeffs: vec![zero; order + 1],
            point,
        }
    }

    /// The series of `t` itself: `a + u`.
    pub fn identity(point: Coefficient, order: usize) -> Series {
        let mut s = Series::zero(point.clone(), order);
        s.coeffs[0] = point.clone();
        if order >= 1 {
            s.coeffs[1] = Coefficient::one(point.backend());
        }
        s
    }

    pub fn point(&self) -> &Coefficient {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.point.backend()
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &Coefficient {
        &self.coeffs[j]
    }

    fn check(&self, other: &Series) -> Result<(), SeriesError> {
        if self.backend() != other.backend() {
            return Err(SeriesError::BackendMismatch(self.backend(), other.backend()));
        }
        if self.point != other.point {
            return Err(SeriesError::PointMismatch(
                self.point.to_string(),
                other.point.to_string(),
            ));
        }
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Series,
        op: impl Fn(&Coefficient, &Coefficient) -> Coefficient,
    ) -> Result<Series, SeriesError> {
        self.check(other)?;
        Ok(Series {
            point: self.point.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Series) -> Result<Series, SeriesError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Series, SeriesError> {
        if c.backend() != self.backend() {
            return Err(SeriesError::BackendMismatch(self.backend(), c.backend()));
        }
        Ok(Series {
            point: self.point.clone(),
            coeffs: self.coeffs.iter().map(|x| c * x).collect(),
        })
    }

    pub fn neg(&self) -> Series {
        Series {
            point: self.point.clone(),
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    /// Adds `c` to the constant term.
    pub fn add_constant(&self, c: &Coefficient) -> Result<Series, SeriesError> {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].try_add(c)?;
        Ok(out)
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check(other)?;
        let n = self.order();
        let zero = Coefficient::zero(self.backend());
        let mut coeffs = vec![zero; n + 1];
        // skip zero leading runs; iterates are often sparse near the start
        let lo_a = self.coeffs.iter().position(|c| !c.is_zero());
        let lo_b = other.coeffs.iter().position(|c| !c.is_zero());
        if let (Some(lo_a), Some(lo_b)) = (lo_a, lo_b) {
            for i in lo_a..=n {
                let a = &self.coeffs[i];
                if a.is_zero() {
                    continue;
                }
                for j in lo_b..=(n - i) {
                    let b = &other.coeffs[j];
                    if b.is_zero() {
                        continue;
                    }
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(Series {
            point: self.point.clone(),
            coeffs,
        })
    }

    pub fn pow(&self, exp: u32) -> Result<Series, SeriesError> {
        let mut acc = Series::constant(Coefficient::one(self.backend()), self.point.clone(), self.order())?;
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `int_a^t p(s) ds`, truncated to the same order.
    pub fn integrate(&self) -> Series {
        let n = self.order();
        let backend = self.backend();
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Coefficient::zero(backend));
        for j in 0..n {
            let c = &self.coeffs[j];
            if c.is_zero() {
                coeffs.push(c.clone());
            } else {
                coeffs.push(c / &Coefficient::int(j as i64 + 1, backend));
            }
        }
        Series {
            point: self.point.clone(),
            coeffs,
        }
    }

    /// Termwise derivative; the top coefficient becomes zero.
    pub fn differentiate(&self) -> Series {
        let n = self.order();
        let backend = self.backend();
        let mut coeffs: Vec<Coefficient> = (0..n)
            .map(|j| &self.coeffs[j + 1] * &Coefficient::int(j as i64 + 1, backend))
            .collect();
        coeffs.push(Coefficient::zero(backend));
        Series {
            point: self.point.clone(),
            coeffs,
        }
    }

    /// Horner evaluation at `x` (in `t`, not `u`).
    pub fn evaluate(&self, x: &Coefficient) -> Result<Coefficient, SeriesError> {
        let u = x.try_sub(&self.point)?;
        let mut acc = Coefficient::zero(self.backend());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &u) + c;
        }
        Ok(acc)
    }

    /// Coefficients rounded half away from zero to `places` decimals.
    pub fn round_coeffs(&self, places: usize) -> Vec<String> {
        self.coeffs.iter().map(|c| c.round_to_places(places)).collect()
    }

    /// Resizes to `order`, zero-filling or truncating.
    pub fn with_order(&self, order: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Coefficient::zero(self.backend()));
        Series {
            point: self.point.clone(),
            coeffs,
        }
    }

    pub fn to_record(&self) -> SeriesRecord {
        let render = |c: &Coefficient| match c {
            Coefficient::Rational(_) => c.to_string(),
            Coefficient::Float(f) => c.to_scientific(f.digits() as usize),
        };
        SeriesRecord {
            point: render(&self.point),
            order: self.order(),
            backend: self.backend().name().to_string(),
            coeffs: self.coeffs.iter().map(render).collect(),
        }
    }

    /// Human-readable polynomial in `t` (or `(t - a)`), omitting exact zeros.
    pub fn to_poly_string(&self, places: usize) -> String {
        let var = if self.point.is_zero() {
            "t".to_string()
        } else {
            format!("(t - {})", self.point)
        };
        let mut out = String::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let text = c.abs().round_to_places(places);
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&text);
            match j {
                0 => {}
                1 => {
                    out.push(' ');
                    out.push_str(&var);
                }
                _ => {
                    out.push(' ');
                    out.push_str(&format!("{var}^{j}"));
                }
            }
        }
        if out.is_empty() {
            out.push_str(&Coefficient::zero(Backend::Rational).round_to_places(places));
        }
        out
    }
}

impl SeriesRecord {
    /// Rebuilds a series from a record in the rational backend, or at `digits`
    /// for float records.
    pub fn to_series(&self, digits: u32) -> Result<Series, SeriesError> {
        let backend = match self.backend.as_str() {
            "rational" => Backend::Rational,
            _ => Backend::float(digits)?,
        };
        let point = Coefficient::parse(&self.point, backend)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| Coefficient::parse(c, backend))
            .collect::<Result<Vec<_>, _>>()?;
        Series::new(point, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Coefficient {
        Coefficient::ratio(n, d)
    }

    fn rs(cs: &[(i64, i64)]) -> Series {
        Series::new(Coefficient::from(0), cs.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    fn ints(cs: &[i64]) -> Series {
        Series::new(Coefficient::from(0), cs.iter().map(|&n| Coefficient::from(n)).collect()).unwrap()
    }

    #[test]
    fn constants() {
        let z = Series::constant(Coefficient::from(0), Coefficient::from(0), 3).unwrap();
        assert_eq!(z, ints(&[0, 0, 0, 0]));
        let third = Series::constant(q(1, 3), Coefficient::from(0), 2).unwrap();
        assert_eq!(third, rs(&[(1, 3), (0, 1), (0, 1)]));
    }

    #[test]
    fn float_constant_cos_one() {
        let c = crate::coeff::transcendental_constant(crate::Func::Cos, &Coefficient::from(1), 40).unwrap();
        let a = Coefficient::zero(c.backend());
        let s = Series::constant(c, a, 1).unwrap();
        assert_eq!(s.round_coeffs(4), vec!["0.5403", "0.0000"]);
    }

    #[test]
    fn add_and_scale() {
        assert_eq!(ints(&[1, 2]).add(&ints(&[3, 4])).unwrap(), ints(&[4, 6]));
        let p = ints(&[5, -1, 7]);
        assert_eq!(p.scale(&Coefficient::from(0)).unwrap(), ints(&[0, 0, 0]));
        assert_eq!(ints(&[0, 0, 1]).scale(&q(3, 2)).unwrap(), rs(&[(0, 1), (0, 1), (3, 2)]));
    }

    #[test]
    fn mismatches_are_errors() {
        let a = ints(&[1, 2]);
        assert!(matches!(
            a.add(&ints(&[1, 2, 3])),
            Err(SeriesError::OrderMismatch(1, 2))
        ));
        let shifted = Series::new(Coefficient::from(1), vec![Coefficient::from(1); 2]).unwrap();
        assert!(matches!(a.mul(&shifted), Err(SeriesError::PointMismatch(..))));
        let f = Series::zero(Coefficient::zero(Backend::Float { digits: 40 }), 1);
        assert!(matches!(a.add(&f), Err(SeriesError::BackendMismatch(..))));
        assert!(a.scale(&Coefficient::one(Backend::Float { digits: 40 })).is_err());
    }

    #[test]
    fn cauchy_product() {
        assert_eq!(ints(&[1, 1, 0]).mul(&ints(&[1, -1, 0])).unwrap(), ints(&[1, 0, -1]));
        let p = rs(&[(2, 3), (-1, 5), (7, 1)]);
        assert_eq!(p.mul(&ints(&[1, 0, 0])).unwrap(), p);
        // partial sum of sin squared, against a hand double loop
        let sin5 = rs(&[(0, 1), (1, 1), (0, 1), (-1, 6), (0, 1), (1, 120)]);
        assert_eq!(
            sin5.mul(&sin5).unwrap(),
            rs(&[(0, 1), (0, 1), (1, 1), (0, 1), (-1, 3), (0, 1)])
        );
    }

    #[test]
    fn powers() {
        let p = ints(&[1, 1, 0, 0, 0]);
        assert_eq!(p.pow(4).unwrap(), ints(&[1, 4, 6, 4, 1]));
        assert_eq!(p.pow(0).unwrap(), ints(&[1, 0, 0, 0, 0]));
    }

    #[test]
    fn integration() {
        assert_eq!(ints(&[1, 0, 0]).integrate(), ints(&[0, 1, 0]));
        assert_eq!(ints(&[0, 0, 1, 0]).integrate(), rs(&[(0, 1), (0, 1), (0, 1), (1, 3)]));
        let one = Coefficient::from(1);
        let mut v = ints(&[1, 0, 0, 0]);
        for _ in 0..3 {
            v = v.integrate().add_constant(&one).unwrap();
        }
        assert_eq!(v, rs(&[(1, 1), (1, 1), (1, 2), (1, 6)]));
    }

    #[test]
    fn differentiation() {
        assert_eq!(ints(&[0, 1]).differentiate(), ints(&[1, 0]));
        let p = rs(&[(1, 1), (1, 1), (1, 2), (1, 6)]);
        assert_eq!(p.differentiate(), rs(&[(1, 1), (1, 1), (1, 2), (0, 1)]));
        let r = rs(&[(3, 1), (-2, 7), (5, 4), (9, 1)]);
        let back = r.integrate().differentiate();
        assert_eq!(&back.coeffs()[..3], &r.coeffs()[..3]);
    }

    #[test]
    fn horner() {
        assert_eq!(
            ints(&[1, 2, 3]).evaluate(&Coefficient::from(0)).unwrap(),
            Coefficient::from(1)
        );
        assert_eq!(ints(&[0, 1]).evaluate(&q(1, 2)).unwrap(), q(1, 2));
        // around a = 1: 2 + 3(t - 1) at t = 3
        let s = Series::new(Coefficient::from(1), vec![Coefficient::from(2), Coefficient::from(3)]).unwrap();
        assert_eq!(s.evaluate(&Coefficient::from(3)).unwrap(), Coefficient::from(8));
    }

    #[test]
    fn identity_around_point() {
        let t = Series::identity(Coefficient::from(2), 3);
        assert_eq!(t.coeffs()[..2], [Coefficient::from(2), Coefficient::from(1)]);
        assert_eq!(t.evaluate(&Coefficient::from(5)).unwrap(), Coefficient::from(5));
    }

    #[test]
    fn rounding_and_rendering() {
        assert_eq!(rs(&[(1, 6)]).round_coeffs(5), vec!["0.16667"]);
        assert_eq!(ints(&[0]).round_coeffs(5), vec!["0.00000"]);
        assert_eq!(rs(&[(17, 315)]).round_coeffs(5), vec!["0.05397"]);
        let s = rs(&[(0, 1), (1, 1), (0, 1), (-1, 6)]);
        assert_eq!(s.to_poly_string(5), "1.00000 t - 0.16667 t^3");
        assert_eq!(ints(&[0, 0]).to_poly_string(5), "0.00000");
        assert_eq!(ints(&[-2, 0]).to_poly_string(2), "-2.00");
    }

    #[test]
    fn record_round_trip() {
        let s = rs(&[(1, 3), (-2, 1), (5, 7)]);
        let rec = s.to_record();
        assert_eq!(rec.coeffs, vec!["1/3", "-2", "5/7"]);
        assert_eq!(rec.to_series(40).unwrap(), s);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"backend\":\"rational\""));
    }
}
