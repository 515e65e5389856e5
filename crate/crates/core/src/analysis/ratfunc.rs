//! Sparse multivariate polynomials and rational functions over the rationals.
//!
//! Used for the symbolic homogeneity check and as a second, independent
//! differentiation route (quotient rule, no simplification).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{int, Rational};

/// Upper bound on `terms(a) * terms(b)` for a single product.
pub const PRODUCT_WORK_LIMIT: usize = 2_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum RatFuncError {
    #[error("division by the zero function")]
    ZeroDivision,
    #[error("expansion exceeds the polynomial size limit")]
    TooLarge,
}

/// Exponent vector, trailing zeros trimmed.
type Monomial = Vec<u32>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = MPoly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        MPoly::constant(Rational::one())
    }

    /// The variable `q_{index+1}` (zero-based `index`).
    pub fn var(index: usize) -> Self {
        let mut m = vec![0; index + 1];
        m[index] = 1;
        let mut p = MPoly::zero();
        p.terms.insert(m, Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(d)` when every term has total degree `d`; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &MPoly) -> MPoly {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, k: &Rational) -> MPoly {
        if k.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, rhs: &MPoly) -> Result<MPoly, RatFuncError> {
        if self.terms.len().saturating_mul(rhs.terms.len()) > PRODUCT_WORK_LIMIT {
            return Err(RatFuncError::TooLarge);
        }
        let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *out.entry(mono_mul(ma, mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(MPoly { terms: out })
    }

    pub fn pow(&self, e: u32) -> Result<MPoly, RatFuncError> {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
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

    pub fn derivative(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] -= 1;
            out.terms.insert(trim(m2), c * int(i64::from(e)));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(Rational::zero);
                    term *= num_traits::pow(x, e as usize);
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("q{}", i + 1) } else { format!("q{}^{e}", i + 1) })
                .collect();
            let coeff_is_one = mag.is_one();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if coeff_is_one {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `numer / denom`, not reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub numer: MPoly,
    pub denom: MPoly,
}

impl RatFunc {
    pub fn from_poly(p: MPoly) -> Self {
        RatFunc {
            numer: p,
            denom: MPoly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(MPoly::constant(c))
    }

    pub fn add(&self, rhs: &RatFunc) -> Result<RatFunc, RatFuncError> {
        if self.denom == rhs.denom {
            return Ok(RatFunc {
                numer: self.numer.add(&rhs.numer),
                denom: self.denom.clone(),
            });
        }
        Ok(RatFunc {
            numer: self.numer.mul(&rhs.denom)?.add(&rhs.numer.mul(&self.denom)?),
            denom: self.denom.mul(&rhs.denom)?,
        })
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            numer: self.numer.neg(),
            denom: self.denom.clone(),
        }
    }

    pub fn mul(&self, rhs: &RatFunc) -> Result<RatFunc, RatFuncError> {
        Ok(RatFunc {
            numer: self.numer.mul(&rhs.numer)?,
            denom: self.denom.mul(&rhs.denom)?,
        })
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc, RatFuncError> {
        if rhs.numer.is_zero() {
            return Err(RatFuncError::ZeroDivision);
        }
        Ok(RatFunc {
            numer: self.numer.mul(&rhs.denom)?,
            denom: self.denom.mul(&rhs.numer)?,
        })
    }

    pub fn powi(&self, e: i32) -> Result<RatFunc, RatFuncError> {
        let p = RatFunc {
            numer: self.numer.pow(e.unsigned_abs())?,
            denom: self.denom.pow(e.unsigned_abs())?,
        };
        if e >= 0 {
            Ok(p)
        } else {
            RatFunc::constant(Rational::one()).div(&p)
        }
    }

    pub fn derivative(&self, var: usize) -> Result<RatFunc, RatFuncError> {
        let top = self
            .numer
            .derivative(var)
            .mul(&self.denom)?
            .sub(&self.numer.mul(&self.denom.derivative(var))?);
        Ok(RatFunc {
            numer: top,
            denom: self.denom.mul(&self.denom)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// `None` at a pole.
    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let d = self.denom.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.numer.eval(point) / d)
    }

    /// Numerator of `sum_i q_i dV/dq_i - degree * V`, over `denom^2`.
    pub fn euler_defect_numerator(&self, n: usize, degree: i64) -> Result<MPoly, RatFuncError> {
        let mut acc = self.numer.mul(&self.denom)?.scale(&int(-degree));
        for i in 0..n {
            let d = self.derivative(i)?;
            acc = acc.add(&MPoly::var(i).mul(&d.numer)?);
        }
        Ok(acc)
    }

    /// Degree when numerator and denominator are both homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let dn = self.numer.homogeneous_degree()?;
        let dd = self.denom.homogeneous_degree()?;
        Some(i64::from(dn) - i64::from(dd))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == MPoly::one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "({})/({})", self.numer, self.denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_defect_of_homogeneous_function_vanishes() {
        // 1/(q1+q2)
        let v = RatFunc::constant(int(1))
            .div(&RatFunc::from_poly(MPoly::var(0).add(&MPoly::var(1))))
            .unwrap();
        assert!(v.euler_defect_numerator(2, -1).unwrap().is_zero());
        assert_eq!(v.homogeneous_degree(), Some(-1));
        assert!(!v.euler_defect_numerator(2, -2).unwrap().is_zero());
    }

    #[test]
    fn quotient_rule() {
        // d/dq1 (1/q1) = -1/q1^2
        let v = RatFunc::from_poly(MPoly::var(0)).powi(-1).unwrap();
        let d = v.derivative(0).unwrap();
        assert_eq!(d.eval(&[int(2)]), Some(Rational::new((-1).into(), 4.into())));
        assert_eq!(v.eval(&[int(0)]), None);
    }

    #[test]
    fn display() {
        let p = MPoly::var(0).pow(2).unwrap().sub(&MPoly::var(1).scale(&int(3)));
        assert_eq!(p.to_string(), "q1^2 - 3*q2");
    }
}
