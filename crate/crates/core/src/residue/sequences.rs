use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::gamma::{gamma_half_integer, HalfInteger, PiMonomial};
use super::ResidueError;
use crate::basis::{rodrigues_p, BasisFamily};
use crate::exact::{
    factorial, int, residue_at_infinity, shifted_residues, ArcElement, Poly, Rational, SFraction,
};

/// Coefficients `c_0..c_3` of `alpha^0..alpha^3` of a residue depending on
/// the multivaluation shift `L -> L + alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePoly {
    pub triple: [u32; 3],
    pub coeffs: [Rational; 4],
}

impl ResiduePoly {
    pub fn c(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    /// `d/d alpha` vanishes identically.
    pub fn is_alpha_independent(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }
}

/// Residue data deciding one entry of the table, by number of zero indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripleResidues {
    /// All indices positive, weight `(t^2-1)^2`.
    Positive(ResiduePoly),
    /// One zero index; weights `(t^2-1)` and `t (t^2-1)`.
    OneZero { moment0: ResiduePoly, moment1: ResiduePoly },
    /// Two zero indices; weights `1, t, t^2` against a single factor.
    TwoZero([ResiduePoly; 3]),
    /// No multivalued factor at all; weights `t^m/(t^2-1)`, `m = 0..3`.
    AllZero([ResiduePoly; 4]),
}

impl TripleResidues {
    pub fn polys(&self) -> Vec<&ResiduePoly> {
        match self {
            TripleResidues::Positive(p) => vec![p],
            TripleResidues::OneZero { moment0, moment1 } => vec![moment0, moment1],
            TripleResidues::TwoZero(ps) => ps.iter().collect(),
            TripleResidues::AllZero(ps) => ps.iter().collect(),
        }
    }

    pub fn is_alpha_independent(&self) -> bool {
        self.polys().into_iter().all(ResiduePoly::is_alpha_independent)
    }
}

/// Exact residue computations over a precomputed [`BasisFamily`].
#[derive(Clone, Debug)]
pub struct ResidueEngine {
    family: BasisFamily,
}

impl ResidueEngine {
    /// Engine able to handle every index up to `max_index` (one extra basis
    /// pair is kept for the zero-index gap sequences).
    pub fn new(max_index: u32) -> Self {
        ResidueEngine {
            family: BasisFamily::new(max_index + 1),
        }
    }

    pub fn with_family(family: BasisFamily) -> Self {
        ResidueEngine { family }
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    fn check(&self, i: u32) -> Result<(), ResidueError> {
        let max = self.family.max_index();
        if i > max {
            return Err(ResidueError::IndexBeyondBasis { index: i, max });
        }
        Ok(())
    }

    /// `weight * prod (eps^-1 Q_i + alpha P_i)` over the positive indices.
    fn shifted(&self, triple: [u32; 3], indices: &[u32], weight: SFraction) -> Result<ResiduePoly, ResidueError> {
        let mut f = ArcElement::monomial(weight, 0);
        for &i in indices {
            self.check(i)?;
            f = f.checked_mul(&self.family.get(i).q_normalized_arc())?;
        }
        Ok(ResiduePoly {
            triple,
            coeffs: shifted_residues(&f)?,
        })
    }

    /// `S_{i,j,k}(alpha)` for positive indices.
    pub fn s_positive(&self, i: u32, j: u32, k: u32) -> Result<ResiduePoly, ResidueError> {
        if i == 0 || j == 0 || k == 0 {
            return Err(ResidueError::IndexOutOfFamily { triple: [i, j, k] });
        }
        self.shifted([i, j, k], &[i, j, k], SFraction::poly(Poly::s().pow(2)))
    }

    /// All residue data attached to a triple, dispatching on zero indices.
    pub fn s_poly(&self, i: u32, j: u32, k: u32) -> Result<TripleResidues, ResidueError> {
        let triple = [i, j, k];
        let nonzero: Vec<u32> = triple.iter().copied().filter(|&x| x > 0).collect();
        let t_pow = |m: usize| Poly::monomial(int(1), m);
        Ok(match nonzero.len() {
            3 => TripleResidues::Positive(self.s_positive(i, j, k)?),
            2 => TripleResidues::OneZero {
                moment0: self.shifted(triple, &nonzero, SFraction::poly(Poly::s()))?,
                moment1: self.shifted(triple, &nonzero, SFraction::poly(&Poly::s() * &Poly::t()))?,
            },
            1 => TripleResidues::TwoZero([
                self.shifted(triple, &nonzero, SFraction::poly(t_pow(0)))?,
                self.shifted(triple, &nonzero, SFraction::poly(t_pow(1)))?,
                self.shifted(triple, &nonzero, SFraction::poly(t_pow(2)))?,
            ]),
            _ => TripleResidues::AllZero(
                [0, 1, 2, 3].map(|m| self.shifted(triple, &[], SFraction::new(t_pow(m), 1)).expect("no basis needed")),
            ),
        })
    }

    /// `Res L P_i P_{i+gap} (t^2-1) t^moment`.
    pub fn s_zero_index(&self, i: u32, gap: i64, moment: u32) -> Result<Rational, ResidueError> {
        let other = i64::from(i) + gap;
        if i == 0 || other < 1 || moment > 1 {
            return Err(ResidueError::InvalidArgument(format!(
                "zero-index sequence needs i >= 1, i+gap >= 1, moment <= 1 (got {i}, {gap}, {moment})"
            )));
        }
        let other = other as u32;
        self.check(i.max(other))?;
        let p = &(&(rodrigues_p(i) * rodrigues_p(other)) * &Poly::s()) * &Poly::monomial(int(1), moment as usize);
        let f = ArcElement::monomial(SFraction::poly(p), 1);
        Ok(residue_at_infinity(&f)?)
    }

    /// `Res t^moment eps_i^-1 Q_i` (`Q_0` itself for `i = 0`).
    pub fn s_double_zero(&self, i: u32, moment: u32) -> Result<Rational, ResidueError> {
        if moment > 2 {
            return Err(ResidueError::InvalidArgument(format!("moment {moment} > 2")));
        }
        self.check(i)?;
        let f = self
            .family
            .get(i)
            .q_normalized_arc()
            .mul_poly(&Poly::monomial(int(1), moment as usize));
        Ok(residue_at_infinity(&f)?)
    }

    /// `Res (t^2-1) (eps_i^-1 Q_i + alpha P_i)^2`, reported with triple `[0, i, i]`.
    pub fn s_jordan(&self, i: u32) -> Result<ResiduePoly, ResidueError> {
        if i == 0 {
            // (t^2-1) Q_0^2 = 1/(t^2-1): no alpha dependence at all.
            return self.shifted([0, 0, 0], &[], SFraction::new(Poly::one(), 1));
        }
        self.shifted([0, i, i], &[i, i], SFraction::poly(Poly::s()))
    }

    /// `3 Res P_i P_j P_k L (t^2-1)^2`, the residue side of the odd-branch identity.
    pub fn odd_branch_residue(&self, i: u32, j: u32, k: u32) -> Result<Rational, ResidueError> {
        if i == 0 || j == 0 || k == 0 {
            return Err(ResidueError::IndexOutOfFamily { triple: [i, j, k] });
        }
        let p = &(&(rodrigues_p(i) * rodrigues_p(j)) * &rodrigues_p(k)) * &Poly::s().pow(2);
        let r = residue_at_infinity(&ArcElement::monomial(SFraction::poly(p), 1))?;
        Ok(r * int(3))
    }

    /// Left-hand side of the four-term recurrence, per `alpha` coefficient.
    pub fn recurrence_residual(&self, i: u32, j: u32, k: u32) -> Result<[Rational; 4], ResidueError> {
        recurrence_residual_from(i, j, k, |[a, b, c]| Ok(self.s_positive(a, b, c)?.coeffs))
    }

    /// Computes `S` for all sorted positive triples up to `max_index`, in parallel.
    pub fn table(&self, max_index: u32) -> Result<STable, ResidueError> {
        let triples = crate::table::sorted_triples(1, max_index);
        let values: Result<Vec<_>, _> = triples
            .par_iter()
            .map(|&[i, j, k]| self.s_positive(i, j, k).map(|p| ([i, j, k], p)))
            .collect();
        Ok(STable {
            max_index,
            values: values?.into_iter().collect(),
        })
    }
}

/// Memo of `S_{i,j,k}` over sorted positive triples.
#[derive(Clone, Debug)]
pub struct STable {
    max_index: u32,
    values: HashMap<[u32; 3], ResiduePoly>,
}

impl STable {
    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    /// Looks up any permutation of a positive triple.
    pub fn get(&self, i: u32, j: u32, k: u32) -> Option<&ResiduePoly> {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.values.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32; 3], &ResiduePoly)> {
        self.values.iter()
    }

    pub fn recurrence_residual(&self, i: u32, j: u32, k: u32) -> Result<[Rational; 4], ResidueError> {
        recurrence_residual_from(i, j, k, |[a, b, c]| {
            self.get(a, b, c)
                .map(|p| p.coeffs.clone())
                .ok_or(ResidueError::IndexBeyondBasis { index: a.max(b).max(c), max: self.max_index })
        })
    }
}

/// ```text
/// -(1+i)(i+j+k+2) S_{i,j,k} + 4i(i-1)(i-2)(i-3-j-k) S_{i-2,j,k}
///   + 4i(2i-1)j(j-1) S_{i-1,j-1,k} + 4i(2i-1)k(k-1) S_{i-1,j,k-1}
/// ```
///
/// Only defined on interior triples (`i >= 3`, `j, k >= 2`), where all four
/// shifted triples stay positive. Outside that range the identity does not
/// hold even when the offending term has a zero coefficient, so such triples
/// are rejected with [`ResidueError::IndexOutOfFamily`].
pub fn recurrence_residual_from(
    i: u32,
    j: u32,
    k: u32,
    lookup: impl Fn([u32; 3]) -> Result<[Rational; 4], ResidueError>,
) -> Result<[Rational; 4], ResidueError> {
    let (ii, jj, kk) = (i64::from(i), i64::from(j), i64::from(k));
    let terms = [
        (-(1 + ii) * (ii + jj + kk + 2), [ii, jj, kk]),
        (4 * ii * (ii - 1) * (ii - 2) * (ii - 3 - jj - kk), [ii - 2, jj, kk]),
        (4 * ii * (2 * ii - 1) * jj * (jj - 1), [ii - 1, jj - 1, kk]),
        (4 * ii * (2 * ii - 1) * kk * (kk - 1), [ii - 1, jj, kk - 1]),
    ];
    if terms.iter().any(|(_, t)| t.iter().any(|&x| x < 1)) {
        return Err(ResidueError::IndexOutOfFamily { triple: [i, j, k] });
    }
    let mut acc: [Rational; 4] = Default::default();
    for (coef, t) in terms {
        let s = lookup([t[0] as u32, t[1] as u32, t[2] as u32])?;
        let c = int(coef);
        for (a, v) in acc.iter_mut().zip(s.iter()) {
            *a += &c * v;
        }
    }
    Ok(acc)
}

fn gamma_int(n: u64) -> Rational {
    Rational::from_integer(factorial(n - 1))
}

fn four_pow(i: u32) -> Rational {
    Rational::from_integer(BigInt::from(4).pow(i))
}

/// Closed forms of the zero-index sequences:
/// moment 0 gives `S1_{i,0} = -2 4^i G(i+1)^2 / ((i+1)(2i+1) i)`,
/// moment 1 gives `S2_{i,1} = -4 4^i G(i+1)^2 / ((2i+1)(2i+3))`.
pub fn zero_index_closed_form(i: u32, moment: u32) -> Rational {
    assert!(i >= 1 && moment <= 1);
    let g = gamma_int(u64::from(i) + 1);
    let g2 = &g * &g;
    let n = i64::from(i);
    match moment {
        0 => int(-2) * four_pow(i) * g2 / int((n + 1) * (2 * n + 1) * n),
        _ => int(-4) * four_pow(i) * g2 / int((2 * n + 1) * (2 * n + 3)),
    }
}

/// `-2 4^i i G(i)^2 / ((2i+1)(i+1))`, zero for `i = 0`.
pub fn jordan_closed_form(i: u32) -> Rational {
    if i == 0 {
        return Rational::zero();
    }
    let g = gamma_int(u64::from(i));
    let n = i64::from(i);
    int(-2) * four_pow(i) * int(n) * &g * &g / int((2 * n + 1) * (n + 1))
}

/// `S_{1,1,2+2k} = -8 16^k G(k+3/2) G(k-1/2) G(k+2) G(k+1) / (G(k+4) G(k+5/2) sqrt(pi))`.
pub fn s_one_one_even_closed_form(k: u32) -> Rational {
    let kk = i64::from(k);
    let half = |m: i64| gamma_half_integer(HalfInteger(m)).expect("finite Gamma value");
    let num = PiMonomial::rational(int(-8) * Rational::from_integer(BigInt::from(16).pow(k)))
        * half(2 * kk + 3)
        * half(2 * kk - 1)
        * half(2 * kk + 4)
        * half(2 * kk + 2);
    let den = half(2 * kk + 8)
        * half(2 * kk + 5)
        * PiMonomial {
            rational: int(1),
            sqrt_pi_power: 1,
        };
    (num / den)
        .as_rational()
        .cloned()
        .expect("powers of pi cancel")
}

/// `(3/2) int_{-1}^{1} P_i P_j P_k (t^2-1)^2 dt`.
pub fn odd_branch_integral(i: u32, j: u32, k: u32) -> Rational {
    let p = &(&(rodrigues_p(i) * rodrigues_p(j)) * &rodrigues_p(k)) * &Poly::s().pow(2);
    p.definite_integral(&int(-1), &int(1)) * Rational::new(BigInt::from(3), BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn anchor_values() {
        let e = ResidueEngine::new(5);
        let s111 = e.s_positive(1, 1, 1).unwrap();
        assert_eq!(s111.coeffs, [int(0), int(0), rat(8, 5), int(0)]);
        let s114 = e.s_positive(1, 1, 4).unwrap();
        assert_eq!(s114.coeffs, [int(0), rat(-64, 15), int(0), int(0)]);
        assert!(e.s_positive(2, 2, 2).unwrap().coeffs.iter().all(Zero::is_zero));
    }

    #[test]
    fn one_one_even_family_closed_form() {
        assert_eq!(s_one_one_even_closed_form(0), rat(16, 9));
        assert_eq!(s_one_one_even_closed_form(1), rat(-64, 15));
    }

    #[test]
    fn zero_index_and_jordan_closed_forms() {
        assert_eq!(zero_index_closed_form(1, 0), rat(-4, 3));
        assert_eq!(zero_index_closed_form(1, 1), rat(-16, 15));
        assert_eq!(jordan_closed_form(1), rat(-4, 3));
        assert!(jordan_closed_form(0).is_zero());
    }

    #[test]
    fn recurrence_on_small_interior_triple() {
        let e = ResidueEngine::new(5);
        let r = e.recurrence_residual(3, 2, 2).unwrap();
        assert!(r.iter().all(Zero::is_zero));
        assert!(matches!(
            e.recurrence_residual(1, 2, 2),
            Err(ResidueError::IndexOutOfFamily { .. })
        ));
    }

    #[test]
    fn double_zero_sequence() {
        let e = ResidueEngine::new(4);
        assert_eq!(e.s_double_zero(1, 2).unwrap(), rat(-2, 3));
        assert!(e.s_double_zero(2, 0).unwrap().is_zero());
        assert!(e.s_double_zero(3, 1).unwrap().is_zero());
    }
}
