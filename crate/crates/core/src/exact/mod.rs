//! Exact arithmetic foundation: rationals, polynomials in `t`, the ring
//! `Q(t)[arctanh(1/t)]` with `(t^2-1)`-power denominators, expansions and
//! residues at infinity, and antiderivatives.

mod arc;
mod integrate;
mod poly;
mod series;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

pub use arc::{ArcElement, SFraction, MAX_L_DEGREE};
pub use integrate::{antiderivative, integrate_fraction, Antiderivative, FractionIntegral};
pub use poly::Poly;
pub use series::{
    arctanh_series, auto_depth, laurent_expand, residue_at_infinity, residue_with_depth,
    shifted_residues, LaurentTail,
};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("truncation depth {depth} is below the required {needed}")]
    TruncationInsufficient { needed: usize, depth: usize },
    #[error("L-degree {degree} exceeds the supported maximum of 3")]
    LDegreeOverflow { degree: usize },
    #[error("integration by parts leaves a ln(t^2-1) term at L-power {l_power}")]
    NotClosedUnderIntegration { l_power: usize },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Renders a rational as `"num/den"` (denominator always present).
pub fn rational_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"num/den"` or a plain integer.
pub fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}
