//! The ring `Q(t)[L]` with `L = arctanh(1/t)` and denominators restricted to
//! powers of `s = t^2 - 1`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;

use super::{binomial, CoreError, Poly, Rational};

/// Highest power of `L` an [`ArcElement`] can carry.
pub const MAX_L_DEGREE: usize = 3;

/// A rational function `numer / (t^2-1)^s_exp`.
///
/// Normalized so that `numer` is not divisible by `t^2 - 1` whenever
/// `s_exp > 0`; the zero fraction always has `s_exp == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SFraction {
    numer: Poly,
    s_exp: u32,
}

impl SFraction {
    pub fn new(numer: Poly, s_exp: u32) -> Self {
        let mut f = SFraction { numer, s_exp };
        f.normalize();
        f
    }

    pub fn zero() -> Self {
        SFraction::default()
    }

    pub fn poly(p: Poly) -> Self {
        SFraction::new(p, 0)
    }

    fn normalize(&mut self) {
        if self.numer.is_zero() {
            self.s_exp = 0;
            return;
        }
        let s = Poly::s();
        while self.s_exp > 0 {
            match self.numer.div_exact(&s) {
                Some(q) => {
                    self.numer = q;
                    self.s_exp -= 1;
                }
                None => break,
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.numer
    }

    pub fn s_exp(&self) -> u32 {
        self.s_exp
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// Rewrites the numerator over `s^target` (requires `target >= s_exp`).
    pub fn numer_over(&self, target: u32) -> Poly {
        debug_assert!(target >= self.s_exp);
        &self.numer * &Poly::s().pow(target - self.s_exp)
    }

    pub fn scale(&self, c: &Rational) -> SFraction {
        SFraction::new(self.numer.scale(c), self.s_exp)
    }

    pub fn mul(&self, rhs: &SFraction) -> SFraction {
        SFraction::new(&self.numer * &rhs.numer, self.s_exp + rhs.s_exp)
    }

    pub fn derivative(&self) -> SFraction {
        // (N / s^m)' = (N' s - 2 m t N) / s^(m+1)
        if self.s_exp == 0 {
            return SFraction::poly(self.numer.derivative());
        }
        let m = Rational::from_integer(BigInt::from(2 * self.s_exp));
        let top = &(&self.numer.derivative() * &Poly::s()) - &(&Poly::t() * &self.numer).scale(&m);
        SFraction::new(top, self.s_exp + 1)
    }
}

impl Add for &SFraction {
    type Output = SFraction;
    fn add(self, rhs: &SFraction) -> SFraction {
        let e = self.s_exp.max(rhs.s_exp);
        SFraction::new(&self.numer_over(e) + &rhs.numer_over(e), e)
    }
}

impl Neg for &SFraction {
    type Output = SFraction;
    fn neg(self) -> SFraction {
        SFraction::new(-&self.numer, self.s_exp)
    }
}

impl fmt::Display for SFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.s_exp {
            0 => write!(f, "{}", self.numer),
            1 => write!(f, "({})/(t^2 - 1)", self.numer),
            e => write!(f, "({})/(t^2 - 1)^{e}", self.numer),
        }
    }
}

/// Element `sum_k c_k(t) L^k` of `Q(t)[L]`, `k <= 3`, each `c_k` an [`SFraction`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ArcElement {
    terms: [SFraction; MAX_L_DEGREE + 1],
}

impl ArcElement {
    pub fn zero() -> Self {
        ArcElement::default()
    }

    pub fn from_poly(p: Poly) -> Self {
        ArcElement::monomial(SFraction::poly(p), 0)
    }

    pub fn constant(c: Rational) -> Self {
        ArcElement::from_poly(Poly::constant(c))
    }

    /// `coeff * L^l_power`. Panics if `l_power > 3`.
    pub fn monomial(coeff: SFraction, l_power: usize) -> Self {
        assert!(l_power <= MAX_L_DEGREE, "L-degree {l_power} exceeds {MAX_L_DEGREE}");
        let mut out = ArcElement::zero();
        out.terms[l_power] = coeff;
        out
    }

    /// `L = arctanh(1/t)`.
    pub fn arctanh() -> Self {
        ArcElement::monomial(SFraction::poly(Poly::one()), 1)
    }

    pub fn from_terms(terms: [SFraction; MAX_L_DEGREE + 1]) -> Self {
        ArcElement { terms }
    }

    /// Coefficient of `L^k` (zero for `k > 3`).
    pub fn coeff(&self, k: usize) -> SFraction {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &[SFraction; MAX_L_DEGREE + 1] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(SFraction::is_zero)
    }

    /// Highest power of `L` with a nonzero coefficient.
    pub fn l_degree(&self) -> Option<usize> {
        self.terms.iter().rposition(|c| !c.is_zero())
    }

    /// Largest degree in `t` among the numerators.
    pub fn max_numer_degree(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|c| c.numer.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn max_s_exp(&self) -> u32 {
        self.terms.iter().map(|c| c.s_exp).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> ArcElement {
        ArcElement {
            terms: self.terms.clone().map(|x| x.scale(c)),
        }
    }

    pub fn mul_fraction(&self, f: &SFraction) -> ArcElement {
        ArcElement {
            terms: self.terms.clone().map(|x| x.mul(f)),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> ArcElement {
        self.mul_fraction(&SFraction::poly(p.clone()))
    }

    /// Product, or an error when the `L`-degree would exceed 3.
    pub fn checked_mul(&self, rhs: &ArcElement) -> Result<ArcElement, CoreError> {
        let mut out = ArcElement::zero();
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.terms.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if i + j > MAX_L_DEGREE {
                    return Err(CoreError::LDegreeOverflow { degree: i + j });
                }
                out.terms[i + j] = &out.terms[i + j] + &a.mul(b);
            }
        }
        Ok(out)
    }

    /// Derivative in `t`, using `dL/dt = -1/(t^2-1)`.
    pub fn derivative(&self) -> ArcElement {
        let inv_s = SFraction::new(Poly::one(), 1);
        let mut out = ArcElement::zero();
        for (k, c) in self.terms.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out.terms[k] = &out.terms[k] + &c.derivative();
            if k > 0 {
                let kk = Rational::from_integer(BigInt::from(k));
                let down = c.mul(&inv_s).scale(&-kk);
                out.terms[k - 1] = &out.terms[k - 1] + &down;
            }
        }
        out
    }

    /// Substitutes `L -> L + alpha` and returns the coefficients of
    /// `alpha^0 .. alpha^3`, each again an element of the ring.
    pub fn shift_multivaluation(&self) -> [ArcElement; MAX_L_DEGREE + 1] {
        let mut out: [ArcElement; MAX_L_DEGREE + 1] = Default::default();
        for (k, c) in self.terms.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for r in 0..=k {
                let b = Rational::from_integer(binomial(k as u64, r as u64));
                let piece = c.scale(&b);
                out[r].terms[k - r] = &out[r].terms[k - r] + &piece;
            }
        }
        out
    }
}

impl Add for &ArcElement {
    type Output = ArcElement;
    fn add(self, rhs: &ArcElement) -> ArcElement {
        let mut terms = self.terms.clone();
        for (t, r) in terms.iter_mut().zip(rhs.terms.iter()) {
            *t = &*t + r;
        }
        ArcElement { terms }
    }
}

impl Sub for &ArcElement {
    type Output = ArcElement;
    fn sub(self, rhs: &ArcElement) -> ArcElement {
        self + &(-rhs)
    }
}

impl Neg for &ArcElement {
    type Output = ArcElement;
    fn neg(self) -> ArcElement {
        ArcElement {
            terms: self.terms.clone().map(|x| -&x),
        }
    }
}

impl fmt::Display for ArcElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "[{c}]*L")?,
                _ => write!(f, "[{c}]*L^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
