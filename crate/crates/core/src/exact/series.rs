//! Expansions at `t = infinity` and the residue there.
//!
//! Everything is expanded in `u = 1/t`: `L = arctanh(u) = sum u^(2p+1)/(2p+1)`
//! and `1/(t^2-1) = u^2/(1-u^2) = sum_{r>=1} u^(2r)`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ArcElement, CoreError, Poly, Rational};

/// Laurent expansion at infinity truncated after `t^(-depth)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTail {
    /// Nonnegative powers of `t`.
    pub poly: Poly,
    /// `tail[r-1]` is the coefficient of `t^(-r)`, `r = 1..=depth`.
    pub tail: Vec<Rational>,
}

impl LaurentTail {
    pub fn depth(&self) -> usize {
        self.tail.len()
    }

    /// Coefficient of `t^(-r)` for `r >= 1`.
    pub fn coeff_neg(&self, r: usize) -> Rational {
        assert!(r >= 1);
        self.tail.get(r - 1).cloned().unwrap_or_else(Rational::zero)
    }

    /// The `t^(-1)` coefficient.
    pub fn residue(&self) -> Rational {
        self.coeff_neg(1)
    }
}

/// `arctanh(1/t)` expanded to `t^(-depth)`.
pub fn arctanh_series(depth: usize) -> Result<LaurentTail, CoreError> {
    if depth == 0 {
        return Err(CoreError::TruncationInsufficient { needed: 1, depth });
    }
    laurent_expand(&ArcElement::arctanh(), depth)
}

/// Truncation depth used when none is given: max numerator degree plus
/// twice the largest `(t^2-1)` exponent plus four.
pub fn auto_depth(f: &ArcElement) -> usize {
    f.max_numer_degree() + 2 * f.max_s_exp() as usize + 4
}

/// Series coefficients in `u` of `L^k / s^m`, for indices `0..len`.
fn basic_series(k: usize, m: u32, len: usize) -> Vec<Rational> {
    thread_local! {
        static CACHE: RefCell<HashMap<(usize, u32), Vec<Rational>>> = RefCell::new(HashMap::new());
    }
    CACHE.with(|cache| {
        if let Some(v) = cache.borrow().get(&(k, m)) {
            if v.len() >= len {
                return v[..len].to_vec();
            }
        }
        // Grow generously so neighbouring requests hit the cache.
        let n = len.max(16).next_power_of_two();
        let v = compute_basic_series(k, m, n);
        let out = v[..len].to_vec();
        cache.borrow_mut().insert((k, m), v);
        out
    })
}

fn compute_basic_series(k: usize, m: u32, n: usize) -> Vec<Rational> {
    let arctanh: Vec<Rational> = (0..n)
        .map(|j| {
            if j % 2 == 1 {
                Rational::new(BigInt::one(), BigInt::from(j))
            } else {
                Rational::zero()
            }
        })
        .collect();
    let inv_s: Vec<Rational> = (0..n)
        .map(|j| {
            if j >= 2 && j % 2 == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut acc = vec![Rational::zero(); n];
    acc[0] = Rational::one();
    for _ in 0..k {
        acc = truncated_mul(&acc, &arctanh, n);
    }
    for _ in 0..m {
        acc = truncated_mul(&acc, &inv_s, n);
    }
    acc
}

fn truncated_mul(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Laurent expansion of `f` at infinity, truncated at `t^(-depth)`.
pub fn laurent_expand(f: &ArcElement, depth: usize) -> Result<LaurentTail, CoreError> {
    if depth == 0 {
        return Err(CoreError::TruncationInsufficient { needed: 1, depth });
    }
    let maxdeg = f.max_numer_degree();
    let mut poly = vec![Rational::zero(); maxdeg + 1];
    let mut tail = vec![Rational::zero(); depth];
    for (k, c) in f.terms().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let numer = c.numer().coeffs();
        let x = basic_series(k, c.s_exp(), numer.len() + depth);
        // n_d t^d * x_j t^(-j) lands on t^(d-j).
        for (d, nd) in numer.iter().enumerate() {
            if nd.is_zero() {
                continue;
            }
            for (j, xj) in x.iter().enumerate().take(d + depth + 1) {
                if xj.is_zero() {
                    continue;
                }
                if j <= d {
                    poly[d - j] += nd * xj;
                } else {
                    tail[j - d - 1] += nd * xj;
                }
            }
        }
    }
    Ok(LaurentTail {
        poly: Poly::from_coeffs(poly),
        tail,
    })
}

/// Coefficient of `t^(-1)` in the expansion of `f` at infinity.
///
/// This is the plain coefficient; no sign flip is applied.
pub fn residue_at_infinity(f: &ArcElement) -> Result<Rational, CoreError> {
    residue_with_depth(f, auto_depth(f))
}

/// Residue with an explicit truncation depth. Only the `t^(-1)`
/// coefficient is accumulated, so the work is bounded by the numerator degrees.
pub fn residue_with_depth(f: &ArcElement, depth: usize) -> Result<Rational, CoreError> {
    let needed = 1;
    if depth < needed {
        return Err(CoreError::TruncationInsufficient { needed, depth });
    }
    let mut acc = Rational::zero();
    for (k, c) in f.terms().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let numer = c.numer().coeffs();
        let x = basic_series(k, c.s_exp(), numer.len() + 1);
        for (d, nd) in numer.iter().enumerate() {
            let xj = &x[d + 1];
            if !nd.is_zero() && !xj.is_zero() {
                acc += nd * xj;
            }
        }
    }
    Ok(acc)
}

/// Residue of each `alpha`-coefficient of `f(t, L + alpha)`.
pub fn shifted_residues(f: &ArcElement) -> Result<[Rational; 4], CoreError> {
    let parts = f.shift_multivaluation();
    let mut out: [Rational; 4] = Default::default();
    for (o, p) in out.iter_mut().zip(parts.iter()) {
        *o = residue_at_infinity(p)?;
    }
    Ok(out)
}
