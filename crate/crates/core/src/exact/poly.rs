//! Dense univariate polynomials in `t` over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Polynomial with rational coefficients, `coeffs[d]` multiplying `t^d`.
///
/// The coefficient vector is kept trimmed: the leading coefficient is
/// nonzero unless the polynomial is zero, in which case the vector is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c * t^degree`.
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(coeffs)
    }

    /// `t`
    pub fn t() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    /// `t^2 - 1`, the only denominator factor this crate works with.
    pub fn s() -> Self {
        Poly::from_ints(&[-1, 0, 1])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `t^d`, zero beyond the degree.
    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| c * Rational::from_integer(BigInt::from(d)))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Rational::zero());
        for (d, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rational::from_integer(BigInt::from(d + 1)));
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// Exact definite integral over `[a, b]`.
    pub fn definite_integral(&self, a: &Rational, b: &Rational) -> Rational {
        let prim = self.integral();
        prim.eval(b) - prim.eval(a)
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    ///
    /// Panics if `divisor` is the zero polynomial.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let nq = self.coeffs.len().saturating_sub(dd);
        let mut quot = vec![Rational::zero(); nq];
        for shift in (0..nq).rev() {
            let c = &rem[shift + dd] / &lead;
            if !c.is_zero() {
                for (k, dc) in divisor.coeffs.iter().enumerate() {
                    rem[shift + k] -= &c * dc;
                }
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// `Some(q)` with `self = q * divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Parity of the polynomial: `Some(0)` if even, `Some(1)` if odd, `None` if mixed.
    /// The zero polynomial reports even.
    pub fn parity(&self) -> Option<u8> {
        let even = self.coeffs.iter().step_by(2).any(|c| !c.is_zero());
        let odd = self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero());
        match (even, odd) {
            (true, true) => None,
            (false, true) => Some(1),
            _ => Some(0),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let show_coeff = d == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match d {
                0 => {}
                1 if show_coeff => write!(f, "*t")?,
                1 => write!(f, "t")?,
                _ if show_coeff => write!(f, "*t^{d}")?,
                _ => write!(f, "t^{d}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = Poly::from_ints(&[3, -2, 0, 5, 1]);
        let b = Poly::from_ints(&[1, 0, 2]);
        let (qt, r) = a.div_rem(&b);
        assert!(r.degree().is_none_or(|d| d < 2));
        assert_eq!(&(&qt * &b) + &r, a);
    }

    #[test]
    fn definite_integral_of_weight() {
        // int_{-1}^{1} (t^2-1)^2 dt = 16/15
        let w = Poly::s().pow(2);
        assert_eq!(w.definite_integral(&q(-1, 1), &q(1, 1)), q(16, 15));
    }

    #[test]
    fn parity_and_display() {
        assert_eq!(Poly::s().parity(), Some(0));
        assert_eq!(Poly::t().parity(), Some(1));
        assert_eq!(Poly::from_ints(&[1, 1]).parity(), None);
        assert_eq!(Poly::from_ints(&[-1, 0, 3]).to_string(), "3*t^2 - 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn exact_division() {
        let s = Poly::s();
        let p = &s * &Poly::from_ints(&[2, 1]);
        assert_eq!(p.div_exact(&s), Some(Poly::from_ints(&[2, 1])));
        assert_eq!(Poly::t().div_exact(&s), None);
    }
}
