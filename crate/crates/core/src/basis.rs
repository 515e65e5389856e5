//! Solution basis of the scalar variational equation
//!
//! ```text
//! (1/2)(t^2-1) y'' + 2 t y' - (1/2)(i-1)(i+2) y = 0
//! ```
//!
//! For `i >= 1` the polynomial solution is generated by the Rodrigues-type
//! formula `P_i = (t^2-1)^(-1) d^(i-1)/dt^(i-1) (t^2-1)^i` and the second
//! solution is `Q_i = eps_i P_i L + W_i/(t^2-1)` with `L = arctanh(1/t)`,
//! normalized so that `P_i Q_i' - P_i' Q_i = (t^2-1)^(-2)` and `Q_i` vanishes
//! at infinity. Index 0 is special: `P_0 = t/(t^2-1)`, `Q_0 = 1/(t^2-1)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{factorial, int, ArcElement, Poly, Rational, SFraction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisPair {
    pub index: u32,
    /// `P_i`; a polynomial for `i >= 1`, `t/(t^2-1)` for `i = 0`.
    pub p: SFraction,
    /// Numerator of the rational part of `Q_i`.
    pub w: Poly,
    /// Coefficient of `P_i L` in `Q_i`; zero for `i = 0`.
    pub epsilon: Rational,
    /// `W_i / eps_i`, the rational part of `eps_i^-1 Q_i` (equal to `w` for `i = 0`).
    pub w_normalized: Poly,
}

impl BasisPair {
    pub fn p_arc(&self) -> ArcElement {
        ArcElement::monomial(self.p.clone(), 0)
    }

    /// `Q_i` itself.
    pub fn q_arc(&self) -> ArcElement {
        let rational = ArcElement::monomial(SFraction::new(self.w.clone(), 1), 0);
        if self.index == 0 {
            return rational;
        }
        &ArcElement::monomial(self.p.scale(&self.epsilon), 1) + &rational
    }

    /// `eps_i^-1 Q_i = P_i L + (W_i/eps_i)/(t^2-1)`; `Q_0` for index 0.
    pub fn q_normalized_arc(&self) -> ArcElement {
        let rational = ArcElement::monomial(SFraction::new(self.w_normalized.clone(), 1), 0);
        if self.index == 0 {
            return rational;
        }
        &ArcElement::monomial(self.p.clone(), 1) + &rational
    }
}

/// `P_i` from the Rodrigues-type formula, `i >= 1`.
pub fn rodrigues_p(i: u32) -> Poly {
    assert!(i >= 1, "Rodrigues polynomials start at index 1");
    let mut acc = Poly::s().pow(i);
    for _ in 1..i {
        acc = acc.derivative();
    }
    acc.div_exact(&Poly::s())
        .expect("(t^2-1) divides the (i-1)-th derivative of (t^2-1)^i")
}

/// Solves `(t^2-1) R'' - i(i+1) R = 2(t^2-1)P' + 2tP` for the unique `R` of degree `<= i`.
///
/// The leading operator coefficient on `t^m` is `m(m-1) - i(i+1)`, nonzero
/// for `m <= i`, so the system is triangular from the top degree down.
fn companion_numerator(i: u32, p: &Poly) -> Poly {
    let rhs = &(&Poly::s() * &p.derivative()).scale(&int(2)) + &(&Poly::t() * p).scale(&int(2));
    let n = i as usize;
    let mu = i64::from(i) * (i64::from(i) + 1);
    let mut r = vec![Rational::zero(); n + 3];
    for m in (0..=n).rev() {
        let mi = m as i64;
        let upper = &r[m + 2] * int((mi + 2) * (mi + 1));
        r[m] = (rhs.coeff(m) + upper) / int(mi * (mi - 1) - mu);
    }
    r.truncate(n + 1);
    Poly::from_coeffs(r)
}

/// Constant `C` with `P y' - P' y = C/(t^2-1)^2` for `y = P L + R/(t^2-1)`.
fn wronskian_constant(p: &Poly, r: &Poly) -> Rational {
    let s = Poly::s();
    let cross = &(p * &r.derivative()) - &(&p.derivative() * r);
    let c = &(&(&s * &cross) - &(&(p * p) * &s)) - &(&(&Poly::t() * p) * r).scale(&int(2));
    assert!(
        c.degree().is_none_or(|d| d == 0),
        "Wronskian of the basis is not constant: {c}"
    );
    c.coeff(0)
}

pub fn basis_pair(i: u32) -> BasisPair {
    if i == 0 {
        return BasisPair {
            index: 0,
            p: SFraction::new(Poly::t(), 1),
            w: Poly::one(),
            epsilon: Rational::zero(),
            w_normalized: Poly::one(),
        };
    }
    let p = rodrigues_p(i);
    let r = companion_numerator(i, &p);
    let c = wronskian_constant(&p, &r);
    let epsilon = c.recip();
    BasisPair {
        index: i,
        w: r.scale(&epsilon),
        p: SFraction::poly(p),
        epsilon,
        w_normalized: r,
    }
}

/// `eps_i = 4^(-i) i (i+1) / (i!)^2`.
pub fn epsilon_closed_form(i: u32) -> Rational {
    assert!(i >= 1);
    let f = factorial(u64::from(i));
    Rational::new(
        BigInt::from(i) * BigInt::from(i + 1),
        BigInt::from(4).pow(i) * &f * &f,
    )
}

/// Applies `(1/2)(t^2-1) y'' + 2t y' - (1/2)(i-1)(i+2) y` to `y`.
pub fn ode_residual(i: u32, y: &ArcElement) -> ArcElement {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let d1 = y.derivative();
    let d2 = d1.derivative();
    let ii = i64::from(i);
    let mu = Rational::new(BigInt::from((ii - 1) * (ii + 2)), BigInt::from(2));
    let a = d2.mul_poly(&Poly::s()).scale(&half);
    let b = d1.mul_poly(&Poly::t()).scale(&int(2));
    &(&a + &b) - &y.scale(&mu)
}

/// `(4n^3+12n^2+8n) f_n - (4n^2+14n+12) t f_{n+1} + (n+3) f_{n+2}` for an arbitrary family.
pub fn recurrence_residual_with(n: u32, family: impl Fn(u32) -> Poly) -> Poly {
    let nn = i64::from(n);
    let a = int(4 * nn.pow(3) + 12 * nn * nn + 8 * nn);
    let b = int(4 * nn * nn + 14 * nn + 12);
    let c = int(nn + 3);
    let first = family(n).scale(&a);
    let second = (&Poly::t() * &family(n + 1)).scale(&b);
    let third = family(n + 2).scale(&c);
    &(&first - &second) + &third
}

/// Three-term recurrence residual for the Rodrigues family; zero for every `n >= 1`.
pub fn recurrence_residual_p(n: u32) -> Poly {
    recurrence_residual_with(n, rodrigues_p)
}

/// `int_{-1}^{1} P_j P_k (t^2-1)^2 dt`, `j, k >= 1`.
pub fn weighted_inner_product(j: u32, k: u32) -> Rational {
    let w = Poly::s().pow(2);
    (&(&rodrigues_p(j) * &rodrigues_p(k)) * &w).definite_integral(&int(-1), &int(1))
}

/// Immutable table of basis pairs `0..=max_index`, shareable across threads.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    pairs: Vec<BasisPair>,
}

impl BasisFamily {
    pub fn new(max_index: u32) -> Self {
        BasisFamily {
            pairs: (0..=max_index).map(basis_pair).collect(),
        }
    }

    /// A family whose `P_index` has 1 added to it, breaking the ODE.
    /// Only meant for exercising the self-check detectors.
    pub fn with_perturbed_p(max_index: u32, index: u32) -> Self {
        let mut fam = BasisFamily::new(max_index);
        if let Some(pair) = fam.pairs.get_mut(index as usize) {
            let bumped = &pair.p + &SFraction::poly(Poly::one());
            pair.p = bumped;
        }
        fam
    }

    pub fn max_index(&self) -> u32 {
        (self.pairs.len() - 1) as u32
    }

    /// Panics if `i` exceeds the precomputed range.
    pub fn get(&self, i: u32) -> &BasisPair {
        self.pairs
            .get(i as usize)
            .unwrap_or_else(|| panic!("basis index {i} beyond precomputed {}", self.max_index()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &BasisPair> {
        self.pairs.iter()
    }
}
