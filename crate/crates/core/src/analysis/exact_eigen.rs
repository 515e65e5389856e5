//! Exact spectra of real rational symmetric matrices whose eigenvalues all
//! have the form `(p-1)(p+2)/2`.

use num_traits::{Signed, Zero};

use crate::exact::{int, Poly, Rational};

/// `(p-1)(p+2)/2`.
pub fn lambda_of_p(p: u32) -> Rational {
    let p = i64::from(p);
    Rational::new(((p - 1) * (p + 2)).into(), 2.into())
}

/// Characteristic polynomial `det(x I - A)` by Faddeev-LeVerrier.
pub fn char_poly(a: &[Vec<Rational>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = int(1);
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / int(k as i64);
    }
    Poly::from_coeffs(coeffs)
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Basis of the kernel of `a`, one vector per free column of the reduced
/// row echelon form.
pub fn nullspace(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = int(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact spectrum with an orthogonal (not normalized) eigenbasis `u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSpectrum {
    pub eigenvalues: Vec<Rational>,
    pub p_indices: Vec<u32>,
    pub vectors: Vec<Vec<Rational>>,
    /// `<u_i, u_i>`, all positive.
    pub norms: Vec<Rational>,
}

/// Outcome when part of the characteristic polynomial has no root of the
/// form `(p-1)(p+2)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unmatched {
    /// `(p, multiplicity)` of the roots that do match.
    pub matched: Vec<(u32, usize)>,
    /// Cofactor holding the remaining roots.
    pub remainder: Poly,
}

fn horner_zero(p: &Poly, x: &Rational) -> bool {
    p.eval(x).is_zero()
}

/// Roots `(p-1)(p+2)/2` of the characteristic polynomial with multiplicity,
/// increasing in `p`, and the cofactor left over.
pub fn match_spectrum(a: &[Vec<Rational>]) -> (Vec<(u32, usize)>, Poly) {
    let mut chi = char_poly(a);
    // every eigenvalue of a real symmetric matrix lies in [-R, R]
    let bound: Rational = a
        .iter()
        .map(|row| row.iter().map(Signed::abs).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero);
    let mut matched = Vec::new();
    let mut p = 0u32;
    loop {
        let lambda = lambda_of_p(p);
        if p >= 2 && lambda > bound {
            break;
        }
        let factor = Poly::from_coeffs(vec![-lambda.clone(), int(1)]);
        let mut mult = 0;
        while chi.degree().unwrap_or(0) > 0 && horner_zero(&chi, &lambda) {
            chi = chi.div_exact(&factor).expect("root divides exactly");
            mult += 1;
        }
        if mult > 0 {
            matched.push((p, mult));
        }
        p += 1;
    }
    (matched, chi)
}

/// Exact spectrum of a real rational symmetric `a`, or the unmatched part.
/// When `first` is an eigenvector for eigenvalue 2 it becomes `u_1`.
pub fn exact_spectrum(a: &[Vec<Rational>], first: Option<&[Rational]>) -> Result<ExactSpectrum, Unmatched> {
    let (matched, remainder) = match_spectrum(a);
    if remainder.degree().unwrap_or(0) > 0 {
        return Err(Unmatched { matched, remainder });
    }
    let n = a.len();
    let mut order: Vec<(u32, usize)> = matched;
    if first.is_some() {
        if let Some(pos) = order.iter().position(|&(p, _)| p == 2) {
            let two = order.remove(pos);
            order.insert(0, two);
        }
    }
    let mut out = ExactSpectrum {
        eigenvalues: Vec::with_capacity(n),
        p_indices: Vec::with_capacity(n),
        vectors: Vec::with_capacity(n),
        norms: Vec::with_capacity(n),
    };
    for (p, mult) in order {
        let lambda = lambda_of_p(p);
        let shifted: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { &a[i][j] - &lambda } else { a[i][j].clone() }).collect())
            .collect();
        let mut pool = nullspace(&shifted);
        debug_assert_eq!(pool.len(), mult, "symmetric rational matrices are diagonalizable");
        if p == 2 {
            if let Some(c) = first {
                pool.insert(0, c.to_vec());
            }
        }
        let mut basis: Vec<(Vec<Rational>, Rational)> = Vec::with_capacity(mult);
        for v in pool {
            if basis.len() == mult {
                break;
            }
            let mut u = v;
            for (b, nb) in &basis {
                let k = dot(&u, b) / nb;
                for (x, y) in u.iter_mut().zip(b) {
                    *x -= &k * y;
                }
            }
            if u.iter().all(Zero::is_zero) {
                continue;
            }
            let nu = dot(&u, &u);
            basis.push((u, nu));
        }
        for (u, nu) in basis {
            out.eigenvalues.push(lambda.clone());
            out.p_indices.push(p);
            out.vectors.push(u);
            out.norms.push(nu);
        }
    }
    Ok(out)
}
