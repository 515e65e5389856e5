//! Expression trees for rational functions in `q1..qN`, with symbolic
//! differentiation and evaluation over any field-like scalar.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::ratfunc::{MPoly, RatFunc, RatFuncError};
use crate::exact::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    /// Zero-based variable index: `Var(0)` is `q1`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Scalars an [`Expr`] can be evaluated over.
pub trait Scalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;

    /// Whether a value is usable (finite) after an operation.
    fn is_finite_value(&self) -> bool {
        true
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for Complex64 {
    fn from_rational(r: &Rational) -> Self {
        use num_traits::ToPrimitive;
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Evaluation hit a zero denominator or produced a non-finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoleError;

impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_zero_const(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    fn is_one_const(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            _ if a.is_zero_const() => b,
            _ if b.is_zero_const() => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            _ if b.is_zero_const() => a,
            _ if a.is_zero_const() => Expr::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            _ if a.is_zero_const() || b.is_zero_const() => Expr::zero(),
            _ if a.is_one_const() => b,
            _ if b.is_one_const() => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    /// Symbolic quotient; a constant zero divisor is kept so evaluation reports it.
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
            _ if b.is_one_const() => a,
            _ if a.is_zero_const() && !b.is_zero_const() => Expr::zero(),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, e: i32) -> Expr {
        match (&a, e) {
            (_, 0) => Expr::one(),
            (_, 1) => a,
            (Expr::Const(c), _) if !c.is_zero() => Expr::Const(num_traits::pow::Pow::pow(c, e)),
            _ => Expr::Pow(Box::new(a), e),
        }
    }

    /// Largest variable index plus one.
    pub fn dimension(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) => a.dimension(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.dimension().max(b.dimension()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) => 1 + a.node_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn derivative(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => Expr::neg(a.derivative(var)),
            Expr::Add(a, b) => Expr::add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(var), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative(var);
                let db = b.derivative(var);
                let top = Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db));
                Expr::div(top, Expr::pow((**b).clone(), 2))
            }
            Expr::Pow(a, e) => {
                let da = a.derivative(var);
                if da.is_zero_const() {
                    return Expr::zero();
                }
                let outer = Expr::mul(Expr::Const(int(i64::from(*e))), Expr::pow((**a).clone(), e - 1));
                Expr::mul(outer, da)
            }
        }
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, PoleError> {
        let v = match self {
            Expr::Const(c) => S::from_rational(c),
            Expr::Var(i) => point.get(*i).cloned().unwrap_or_else(S::zero),
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let d = b.eval(point)?;
                if d.is_zero() {
                    return Err(PoleError);
                }
                a.eval(point)? / d
            }
            Expr::Pow(a, e) => {
                let base = a.eval(point)?;
                if *e < 0 && base.is_zero() {
                    return Err(PoleError);
                }
                let mut acc = S::one();
                for _ in 0..e.unsigned_abs() {
                    acc = acc * base.clone();
                }
                if *e < 0 {
                    S::one() / acc
                } else {
                    acc
                }
            }
        };
        if v.is_finite_value() {
            Ok(v)
        } else {
            Err(PoleError)
        }
    }

    /// Converts to a (non-reduced) quotient of polynomials.
    pub fn to_ratfunc(&self) -> Result<RatFunc, RatFuncError> {
        Ok(match self {
            Expr::Const(c) => RatFunc::constant(c.clone()),
            Expr::Var(i) => RatFunc::from_poly(MPoly::var(*i)),
            Expr::Neg(a) => a.to_ratfunc()?.neg(),
            Expr::Add(a, b) => a.to_ratfunc()?.add(&b.to_ratfunc()?)?,
            Expr::Sub(a, b) => a.to_ratfunc()?.add(&b.to_ratfunc()?.neg())?,
            Expr::Mul(a, b) => a.to_ratfunc()?.mul(&b.to_ratfunc()?)?,
            Expr::Div(a, b) => a.to_ratfunc()?.div(&b.to_ratfunc()?)?,
            Expr::Pow(a, e) => a.to_ratfunc()?.powi(*e)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if !c.is_integer() || c < &Rational::zero() => 2,
            Expr::Const(_) | Expr::Var(_) => 5,
        }
    }
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "q{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, 4)
            }
            Expr::Add(a, b) => {
                paren(f, a, 1)?;
                write!(f, " + ")?;
                paren(f, b, 2)
            }
            Expr::Sub(a, b) => {
                paren(f, a, 1)?;
                write!(f, " - ")?;
                paren(f, b, 2)
            }
            Expr::Mul(a, b) => {
                paren(f, a, 2)?;
                write!(f, "*")?;
                paren(f, b, 3)
            }
            Expr::Div(a, b) => {
                paren(f, a, 2)?;
                write!(f, "/")?;
                paren(f, b, 4)
            }
            Expr::Pow(a, e) => {
                paren(f, a, 5)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: usize) -> Expr {
        Expr::Var(i)
    }

    #[test]
    fn derivative_of_inverse() {
        // V = -1/q1, V' = 1/q1^2, V''' = 6/q1^4
        let v = Expr::div(Expr::Const(int(-1)), q(0));
        let d3 = v.derivative(0).derivative(0).derivative(0);
        assert_eq!(d3.eval(&[int(-1)]).unwrap(), int(6));
        assert_eq!(v.derivative(0).eval(&[int(-1)]).unwrap(), int(1));
    }

    #[test]
    fn pole_detected() {
        let v = Expr::div(Expr::one(), q(0));
        assert_eq!(v.eval(&[int(0)]), Err(PoleError));
        let w = Expr::pow(q(0), -2);
        assert_eq!(w.eval(&[Complex64::new(0.0, 0.0)]), Err(PoleError));
    }

    #[test]
    fn display_round_trip_shape() {
        let e = Expr::sub(Expr::div(Expr::one(), q(0)), Expr::pow(Expr::add(q(0), q(1)), 3));
        assert_eq!(e.to_string(), "1/q1 - (q1 + q2)^3");
    }
}
