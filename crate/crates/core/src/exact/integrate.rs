//! Antiderivatives in `Q(t)[L, ln(t^2-1)]` by repeated integration by parts.
//!
//! For `F = sum_k F_k L^k` we look for `G = sum_k Z_k L^k + r ln(t^2-1)` with
//! `G' = F`. Matching powers of `L` gives, from the top down,
//! `Z_k' = F_k + (k+1) Z_{k+1} / (t^2-1)`. Each right-hand side is
//! integrated in closed form; a leftover multiple of `L` is absorbed into
//! the integration constant of `Z_{k+1}`, while a leftover `ln(t^2-1)` is
//! only admissible at `k = 0`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{residue_at_infinity, ArcElement, CoreError, Poly, Rational, SFraction, MAX_L_DEGREE};

/// `body + log_coefficient * ln(t^2 - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Antiderivative {
    pub body: ArcElement,
    pub log_coefficient: Rational,
}

impl Antiderivative {
    /// Derivative of the represented function, as an [`ArcElement`].
    pub fn derivative(&self) -> ArcElement {
        let log_part = SFraction::new(Poly::t().scale(&(&self.log_coefficient * Rational::from_integer(2.into()))), 1);
        &self.body.derivative() + &ArcElement::monomial(log_part, 0)
    }
}

/// Closed-form integral of `numer / (t^2-1)^m`: a rational part, the
/// coefficient of `L` and the coefficient of `ln(t^2-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FractionIntegral {
    pub rational: SFraction,
    pub arctanh: Rational,
    pub log: Rational,
}

pub fn integrate_fraction(f: &SFraction) -> FractionIntegral {
    let mut out = FractionIntegral::default();
    let mut pending = f.clone();
    loop {
        let m = pending.s_exp();
        if m == 0 {
            out.rational = &out.rational + &SFraction::poly(pending.numer().integral());
            return out;
        }
        let (quot, rem) = pending.numer().div_rem(&Poly::s());
        let r0 = rem.coeff(0);
        let r1 = rem.coeff(1);
        let mut carried = quot;
        if m == 1 {
            // int t/s = ln(s)/2, int 1/s = -L
            out.log += &r1 / Rational::from_integer(2.into());
            out.arctanh -= &r0;
        } else {
            let mm = Rational::from_integer(BigInt::from(m - 1));
            let two_mm = &mm * Rational::from_integer(2.into());
            // int t/s^m = -1/(2(m-1) s^(m-1))
            let p1 = Poly::constant(-&r1 / &two_mm);
            // int 1/s^m = -t/(2(m-1) s^(m-1)) + (3-2m)/(2(m-1)) int 1/s^(m-1)
            let p0 = Poly::t().scale(&(-&r0 / &two_mm));
            out.rational = &out.rational + &SFraction::new(&p1 + &p0, m - 1);
            let factor = Rational::from_integer(BigInt::from(3 - 2 * i64::from(m))) / &two_mm;
            carried = &carried + &Poly::constant(&r0 * factor);
        }
        pending = SFraction::new(carried, m - 1);
    }
}

/// Antiderivative of `f` in `Q(t)[L, ln(t^2-1)]`.
///
/// Fails with [`CoreError::NotClosedUnderIntegration`] when a term
/// `L^k ln(t^2-1)` with `k >= 1` would be required.
pub fn antiderivative(f: &ArcElement) -> Result<Antiderivative, CoreError> {
    let Some(top) = f.l_degree() else {
        return Ok(Antiderivative {
            body: ArcElement::zero(),
            log_coefficient: Rational::zero(),
        });
    };
    // z[k] is the coefficient of L^k in the result; z[top + 1] starts as a bare constant.
    let mut z: Vec<SFraction> = vec![SFraction::zero(); top + 2];
    let inv_s = SFraction::new(Poly::one(), 1);
    let mut log_coefficient = Rational::zero();
    for k in (0..=top).rev() {
        let kp1 = Rational::from_integer(BigInt::from(k + 1));
        let h = &f.coeff(k) + &z[k + 1].mul(&inv_s).scale(&kp1);
        let integral = integrate_fraction(&h);
        // Adding c to z[k+1] adds -(k+1) c L here; pick c to cancel the L term.
        let c = &integral.arctanh / &kp1;
        z[k + 1] = &z[k + 1] + &SFraction::poly(Poly::constant(c));
        if !integral.log.is_zero() {
            if k > 0 {
                return Err(CoreError::NotClosedUnderIntegration { l_power: k });
            }
            log_coefficient = integral.log.clone();
        }
        z[k] = integral.rational;
    }
    if z.len() > MAX_L_DEGREE + 1 && !z[MAX_L_DEGREE + 1].is_zero() {
        return Err(CoreError::LDegreeOverflow { degree: MAX_L_DEGREE + 1 });
    }
    let mut terms: [SFraction; MAX_L_DEGREE + 1] = Default::default();
    for (k, zk) in z.into_iter().enumerate().take(MAX_L_DEGREE + 1) {
        terms[k] = zk;
    }
    let result = Antiderivative {
        body: ArcElement::from_terms(terms),
        log_coefficient,
    };
    debug_assert_eq!(
        result.log_coefficient.clone() * Rational::from_integer(2.into()),
        residue_at_infinity(f)?
    );
    Ok(result)
}
