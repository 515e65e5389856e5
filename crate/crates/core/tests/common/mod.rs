#![allow(dead_code)]

use darboux_core::analysis::eigen::CMatrix;
use darboux_core::analysis::potential::{DerivativeSet, PotentialExpr};
use darboux_core::exact::Rational;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Complex orthogonal `O = (I - K)(I + K)^-1` with `K` skew-symmetric, `O^T O = I`.
pub fn cayley_orthogonal(n: usize, rng: &mut ChaCha8Rng, spread: f64) -> CMatrix {
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let z = c(rng.random_range(-spread..spread), rng.random_range(-spread..spread));
            k[(i, j)] = z;
            k[(j, i)] = -z;
        }
    }
    let id = CMatrix::identity(n, n);
    let inv = (&id + &k).try_inverse().expect("I + K is invertible for small K");
    (&id - &k) * inv
}

/// `O^T diag(d) O` for random `O`, with `d` having distinct entries except for
/// an optional repeated pair.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng, repeat: bool) -> (CMatrix, Vec<Complex64>) {
    let o = cayley_orthogonal(n, rng, 0.4);
    let mut d: Vec<Complex64> = (0..n)
        .map(|i| c(i as f64 + rng.random_range(-0.3..0.3), rng.random_range(-1.0..1.0)))
        .collect();
    if repeat && n >= 2 {
        d[1] = d[0];
    }
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
    (o.transpose() * diag * o, d)
}

/// Exact-rational directional third derivative `D^3 V(x)(u, u, u)` by the
/// five-point stencil with step `h`.
pub fn rational_fd_third(v: &PotentialExpr, x: &[Rational], u: &[Rational], h: &Rational) -> Rational {
    let at = |m: i64| {
        let shift = h * Rational::from_integer(m.into());
        let p: Vec<Rational> = x.iter().zip(u).map(|(xi, ui)| xi + &shift * ui).collect();
        v.expr.eval(&p).expect("no pole near the sample point")
    };
    let two = Rational::from_integer(2.into());
    (at(2) - &two * at(1) + &two * at(-1) - at(-2)) / (&two * h * h * h)
}

/// Floating `D^3 V(x)(u, u, u)` as the central difference of `u^T H u`.
pub fn float_fd_third(dv: &DerivativeSet, x: &[Complex64], u: &[Complex64], h: f64) -> Complex64 {
    let quad = |sign: f64| {
        let p: Vec<Complex64> = x.iter().zip(u).map(|(xi, ui)| xi + ui * (sign * h)).collect();
        let d = dv.at(&p).expect("no pole near the sample point");
        let mut acc = c(0.0, 0.0);
        for a in 0..u.len() {
            for b in 0..u.len() {
                acc += u[a] * u[b] * d.hessian[a][b];
            }
        }
        acc
    };
    (quad(1.0) - quad(-1.0)) / (2.0 * h)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("finite")
}

/// `V` with `(q2, q3)` replaced by a rational rotation through the angle
/// whose half-angle tangent is `t`; `e1` is fixed.
pub fn rotated(template: impl Fn(&str, &str) -> String, t: (i64, i64)) -> String {
    let (a, b) = t;
    let den = a * a + b * b;
    let cos = format!("({}/{})", b * b - a * a, den);
    let sin = format!("({}/{})", 2 * a * b, den);
    let x = format!("({cos}*q2 - {sin}*q3)");
    let y = format!("({sin}*q2 + {cos}*q3)");
    template(&x, &y)
}
