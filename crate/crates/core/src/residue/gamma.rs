//! Exact Gamma values at half-integers, with first-order pole regularization.
//!
//! A regularized factor `Gamma(x0 + slope*eps)` is represented by its leading
//! behaviour `leading * eps^pole_order` as `eps -> 0`, where the leading
//! coefficient is a rational times a power of `sqrt(pi)`.

use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ResidueError;
use crate::exact::{factorial, int, Rational};

/// The number `m/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger(pub i64);

impl HalfInteger {
    pub fn from_integer(n: i64) -> Self {
        HalfInteger(2 * n)
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

/// `rational * sqrt(pi)^sqrt_pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiMonomial {
    pub rational: Rational,
    pub sqrt_pi_power: i32,
}

impl PiMonomial {
    pub fn rational(r: Rational) -> Self {
        PiMonomial {
            rational: r,
            sqrt_pi_power: 0,
        }
    }

    pub fn one() -> Self {
        PiMonomial::rational(Rational::one())
    }

    /// The plain rational value, when the power of `pi` cancels.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.sqrt_pi_power == 0 || self.rational.is_zero()).then_some(&self.rational)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.sqrt().powi(self.sqrt_pi_power)
    }
}

impl Mul for PiMonomial {
    type Output = PiMonomial;
    fn mul(self, rhs: PiMonomial) -> PiMonomial {
        PiMonomial {
            rational: self.rational * rhs.rational,
            sqrt_pi_power: self.sqrt_pi_power + rhs.sqrt_pi_power,
        }
    }
}

impl Div for PiMonomial {
    type Output = PiMonomial;
    fn div(self, rhs: PiMonomial) -> PiMonomial {
        PiMonomial {
            rational: self.rational / rhs.rational,
            sqrt_pi_power: self.sqrt_pi_power - rhs.sqrt_pi_power,
        }
    }
}

/// Leading behaviour `leading * eps^pole_order` of one Gamma factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFactor {
    /// `-1` at a pole, `0` otherwise.
    pub pole_order: i32,
    pub leading: PiMonomial,
}

/// `Gamma(m/2)` for a positive half-integer or integer argument.
pub fn gamma_half_integer(arg: HalfInteger) -> Option<PiMonomial> {
    let m = arg.0;
    if arg.is_integer() {
        let n = m / 2;
        return (n >= 1).then(|| PiMonomial::rational(Rational::from_integer(factorial((n - 1) as u64))));
    }
    // Gamma(n + 1/2) = (2n)! / (4^n n!) sqrt(pi) for n >= 0,
    // Gamma(1/2 - n) = (-4)^n n! / (2n)! sqrt(pi).
    let n = (m - 1) / 2;
    let value = if n >= 0 {
        let n = n as u64;
        Rational::new(factorial(2 * n), BigInt::from(4).pow(n as u32) * factorial(n))
    } else {
        let n = (-n) as u64;
        Rational::new(BigInt::from(-4).pow(n as u32) * factorial(n), factorial(2 * n))
    };
    Some(PiMonomial {
        rational: value,
        sqrt_pi_power: 1,
    })
}

/// Leading term of `Gamma(arg + slope*eps)` as `eps -> 0`.
///
/// At `arg = -n` (a pole) this is `(-1)^n / (n! slope) * eps^-1`.
pub fn gamma_regularized(arg: HalfInteger, slope: &Rational) -> Result<GammaFactor, ResidueError> {
    if let Some(v) = gamma_half_integer(arg) {
        return Ok(GammaFactor {
            pole_order: 0,
            leading: v,
        });
    }
    if slope.is_zero() {
        return Err(ResidueError::ZeroSlopeAtPole { argument_halves: arg.0 });
    }
    let n = (-arg.0 / 2) as u64;
    let sign = if n.is_odd() { -Rational::one() } else { Rational::one() };
    Ok(GammaFactor {
        pole_order: -1,
        leading: PiMonomial::rational(sign / (Rational::from_integer(factorial(n)) * slope)),
    })
}

/// Running product of regularized factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaProduct {
    pub order: i32,
    pub leading: PiMonomial,
}

impl GammaProduct {
    pub fn new() -> Self {
        GammaProduct {
            order: 0,
            leading: PiMonomial::one(),
        }
    }

    pub fn times(mut self, f: GammaFactor) -> Self {
        self.order += f.pole_order;
        self.leading = self.leading * f.leading;
        self
    }

    pub fn over(mut self, f: GammaFactor) -> Self {
        self.order -= f.pole_order;
        self.leading = self.leading / f.leading;
        self
    }

    pub fn scale(mut self, m: PiMonomial) -> Self {
        self.leading = self.leading * m;
        self
    }
}

impl Default for GammaProduct {
    fn default() -> Self {
        GammaProduct::new()
    }
}

/// Evaluates the regularized limit of the hypergeometric closed form
///
/// ```text
/// f(i,j,k) = 2^d i! j! k! G((d+1)/2) G(a/2) G(b/2) G(c/2)
///            / [G((a+3)/2) G((b+3)/2) G((c+3)/2) G((d+4)/2)]
/// ```
///
/// with `a = -i+j+k`, `b = i-j+k`, `c = i+j-k`, `d = i+j+k`, after
/// `i,j,k -> i+eps, j+eps, k+eps`. With `with_inverse_gamma_eps` the product
/// is multiplied by `pi/16 * 1/Gamma(eps)` (the even-`d` branch), otherwise
/// by `3/(8 pi)` (the odd-`d` branch).
pub fn closed_form_f_limit(
    i: u32,
    j: u32,
    k: u32,
    with_inverse_gamma_eps: bool,
) -> Result<Rational, ResidueError> {
    if i == 0 || j == 0 || k == 0 {
        return Err(ResidueError::IndexOutOfFamily { triple: [i, j, k] });
    }
    let (i, j, k) = (i64::from(i), i64::from(j), i64::from(k));
    let (a, b, c, d) = (-i + j + k, i - j + k, i + j - k, i + j + k);
    let one = int(1);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let three_halves = Rational::new(BigInt::from(3), BigInt::from(2));

    let mut prod = GammaProduct::new()
        .scale(PiMonomial::rational(Rational::from_integer(BigInt::from(2).pow(d as u32))));
    for n in [i, j, k] {
        prod = prod.times(gamma_regularized(HalfInteger::from_integer(n + 1), &one)?);
    }
    prod = prod.times(gamma_regularized(HalfInteger(d + 1), &three_halves)?);
    for x in [a, b, c] {
        prod = prod.times(gamma_regularized(HalfInteger(x), &half)?);
    }
    for x in [a, b, c] {
        prod = prod.over(gamma_regularized(HalfInteger(x + 3), &half)?);
    }
    prod = prod.over(gamma_regularized(HalfInteger(d + 4), &three_halves)?);

    let prefactor = if with_inverse_gamma_eps {
        // 1/Gamma(eps) = eps + O(eps^2)
        prod.order += 1;
        PiMonomial {
            rational: Rational::new(BigInt::one(), BigInt::from(16)),
            sqrt_pi_power: 2,
        }
    } else {
        PiMonomial {
            rational: Rational::new(BigInt::from(3), BigInt::from(8)),
            sqrt_pi_power: -2,
        }
    };
    prod = prod.scale(prefactor);

    match prod.order {
        o if o < 0 => Err(ResidueError::InfiniteLimit { triple: triple_u32(i, j, k) }),
        o if o > 0 => Ok(Rational::zero()),
        _ => prod
            .leading
            .as_rational()
            .cloned()
            .ok_or(ResidueError::NonRationalLimit {
                triple: triple_u32(i, j, k),
                sqrt_pi_power: prod.leading.sqrt_pi_power,
            }),
    }
}

/// The parity-selected closed form: the `alpha^2` coefficient for odd
/// `i+j+k`, the `alpha` coefficient for even `i+j+k`.
pub fn closed_form_alpha_coefficient(i: u32, j: u32, k: u32) -> Result<Rational, ResidueError> {
    closed_form_f_limit(i, j, k, (i + j + k) % 2 == 0)
}

fn triple_u32(i: i64, j: i64, k: i64) -> [u32; 3] {
    [i as u32, j as u32, k as u32]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn standard_values() {
        let g = gamma_regularized(HalfInteger(1), &int(1)).unwrap();
        assert_eq!(g.pole_order, 0);
        assert_eq!(g.leading, PiMonomial { rational: int(1), sqrt_pi_power: 1 });

        let g = gamma_regularized(HalfInteger(7), &int(1)).unwrap();
        assert_eq!(g.leading, PiMonomial { rational: rat(15, 8), sqrt_pi_power: 1 });

        // Gamma(-1/2) = -2 sqrt(pi)
        let g = gamma_half_integer(HalfInteger(-1)).unwrap();
        assert_eq!(g.rational, int(-2));
        assert_eq!(gamma_half_integer(HalfInteger(-3)).unwrap().rational, rat(4, 3));
    }

    #[test]
    fn pole_regularization() {
        // Gamma(-1 + eps/2) ~ -2/eps
        let g = gamma_regularized(HalfInteger(-2), &rat(1, 2)).unwrap();
        assert_eq!(g.pole_order, -1);
        assert_eq!(g.leading.rational, int(-2));
        // Gamma(eps) ~ 1/eps
        let g = gamma_regularized(HalfInteger(0), &int(1)).unwrap();
        assert_eq!(g.leading.rational, int(1));
        assert!(gamma_regularized(HalfInteger(-4), &int(0)).is_err());
    }

    #[test]
    fn anchor_limits() {
        assert_eq!(closed_form_f_limit(1, 1, 1, false).unwrap(), rat(8, 5));
        assert_eq!(closed_form_f_limit(1, 1, 4, true).unwrap(), rat(-64, 15));
        assert_eq!(closed_form_f_limit(2, 2, 2, true).unwrap(), int(0));
    }

    #[test]
    fn wrong_branch_is_reported() {
        // even d without the 1/Gamma(eps) factor: pole in c/2 survives
        assert!(matches!(
            closed_form_f_limit(1, 1, 4, false),
            Err(ResidueError::InfiniteLimit { .. })
        ));
        assert!(closed_form_f_limit(0, 1, 1, false).is_err());
    }
}
