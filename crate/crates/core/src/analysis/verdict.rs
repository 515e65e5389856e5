//! Coupling tensor `T_ijk = D^3 V(c)(X_i, X_j, X_k)` and the order-1,
//! order-2, Galois, Jordan, shortcut and Euler verdicts built on it.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::darboux::hermitian_norm;
use super::eigen::JordanCluster;
use super::exact_eigen::{dot, ExactSpectrum};
use super::potential::Derivatives;
use crate::exact::Rational;
use crate::table::a_entry;

/// Picard-Vessiot field when the identity component is `C`.
pub const PV_FIELD_C: &str = "ℂ(φ, φ̇, ln(½ + φ(1 + φ̇/√2)))";
/// Picard-Vessiot field when the identity component is `C^2`.
pub const PV_FIELD_C2: &str = "ℂ(φ, φ̇, ln(½ + φ(1 + φ̇/√2)), ln(φ))";

/// Eigenvalues with a bilinear-orthonormal eigenbasis and p-indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub p_indices: Vec<Option<u32>>,
}

/// Symmetric 3-tensor stored for sorted index triples, with a zero flag per
/// entry (exact in exact mode, thresholded in floating mode).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTensor {
    n: usize,
    values: Vec<Complex64>,
    zero: Vec<bool>,
}

fn sorted3(i: usize, j: usize, k: usize) -> [usize; 3] {
    let mut t = [i, j, k];
    t.sort_unstable();
    t
}

/// Sorted triples `i <= j <= k < n`, in lexicographic order.
pub fn sorted_index_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

impl CouplingTensor {
    fn slot(&self, i: usize, j: usize, k: usize) -> usize {
        let [i, j, k] = sorted3(i, j, k);
        (i * self.n + j) * self.n + k
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[self.slot(i, j, k)]
    }

    pub fn is_zero(&self, i: usize, j: usize, k: usize) -> bool {
        self.zero[self.slot(i, j, k)]
    }

    fn build(n: usize, entries: Vec<([usize; 3], Complex64, bool)>) -> Self {
        let mut t = CouplingTensor {
            n,
            values: vec![Complex64::zero(); n * n * n],
            zero: vec![true; n * n * n],
        };
        for ([i, j, k], v, z) in entries {
            let s = t.slot(i, j, k);
            t.values[s] = v;
            t.zero[s] = z;
        }
        t
    }
}

/// `M_i = D^3 V(X_i, ., .)` for every `i`.
fn contract_first<S>(third: &[S], n: usize, vectors: &[Vec<S>]) -> Vec<Vec<S>>
where
    S: Clone + Zero + std::ops::Mul<Output = S> + Send + Sync,
{
    vectors
        .par_iter()
        .map(|x| {
            let mut m = vec![S::zero(); n * n];
            for a in 0..n {
                if x[a].is_zero() {
                    continue;
                }
                for bc in 0..n * n {
                    m[bc] = m[bc].clone() + x[a].clone() * third[a * n * n + bc].clone();
                }
            }
            m
        })
        .collect()
}

fn bilinear_form<S>(m: &[S], n: usize, y: &[S], z: &[S]) -> S
where
    S: Clone + Zero + std::ops::Mul<Output = S>,
{
    let mut acc = S::zero();
    for b in 0..n {
        if y[b].is_zero() {
            continue;
        }
        let mut row = S::zero();
        for c in 0..n {
            row = row + m[b * n + c].clone() * z[c].clone();
        }
        acc = acc + y[b].clone() * row;
    }
    acc
}

/// Floating tensor; an entry is zero when `|T_ijk| <= tolerance * scale`
/// with `scale = max(1, max|D^3 V| |X_i| |X_j| |X_k|)`.
pub fn coupling_tensor(d: &Derivatives<Complex64>, vectors: &[Vec<Complex64>], tolerance: f64) -> CouplingTensor {
    let n = d.dimension;
    let big = d.third.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norms: Vec<f64> = vectors.iter().map(|v| hermitian_norm(v)).collect();
    let m = contract_first(&d.third, n, vectors);
    let entries = sorted_index_triples(n)
        .into_par_iter()
        .map(|[i, j, k]| {
            let v = bilinear_form(&m[i], n, &vectors[j], &vectors[k]);
            let scale = (big * norms[i] * norms[j] * norms[k]).max(1.0);
            ([i, j, k], v, v.norm() <= tolerance * scale)
        })
        .collect();
    CouplingTensor::build(n, entries)
}

/// Exact tensor on the unnormalized basis `u_i`; values are reported for the
/// normalized `X_i = u_i / sqrt(<u_i, u_i>)`.
pub fn exact_coupling_tensor(d: &Derivatives<Rational>, s: &ExactSpectrum) -> CouplingTensor {
    let n = d.dimension;
    let m = contract_first(&d.third, n, &s.vectors);
    let entries = sorted_index_triples(n)
        .into_par_iter()
        .map(|[i, j, k]| {
            let v = bilinear_form(&m[i], n, &s.vectors[j], &s.vectors[k]);
            let z = v.is_zero();
            let denom = (&s.norms[i] * &s.norms[j] * &s.norms[k]).to_f64().unwrap_or(f64::NAN).sqrt();
            let value = if z { 0.0 } else { v.to_f64().unwrap_or(f64::NAN) / denom };
            ([i, j, k], Complex64::new(value, 0.0), z)
        })
        .collect();
    CouplingTensor::build(n, entries)
}

/// `p = (-1 + sqrt(9 + 8 lambda)) / 2` when it is a nonnegative integer
/// within `int_tolerance`.
pub fn p_index(lambda: Complex64, int_tolerance: f64) -> Option<u32> {
    let p = ((Complex64::new(9.0, 0.0) + 8.0 * lambda).sqrt() - 1.0) / 2.0;
    let r = p.re.round();
    let ok = r >= 0.0 && p.im.abs() <= int_tolerance && (p.re - r).abs() <= int_tolerance * r.max(1.0);
    (ok && r <= f64::from(u32::MAX)).then_some(r as u32)
}

pub fn spectrum_indices(eigenvalues: &[Complex64], int_tolerance: f64) -> Vec<Option<u32>> {
    eigenvalues.iter().map(|&l| p_index(l, int_tolerance)).collect()
}

/// Eigenvalues with no p-index; empty means order 1 passes.
pub fn order1_failures(eigenvalues: &[Complex64], p: &[Option<u32>]) -> Vec<Complex64> {
    eigenvalues.iter().zip(p).filter(|(_, p)| p.is_none()).map(|(l, _)| *l).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Zero-based eigen-indices, `i <= j <= k`.
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub p_triple: [u32; 3],
    pub value: Complex64,
}

impl Violation {
    /// The p-triple in increasing order.
    pub fn p_class(&self) -> [u32; 3] {
        let mut t = self.p_triple;
        t.sort_unstable();
        t
    }
}

/// Every sorted `(i, j, k)` with `A_{p_i, p_j, p_k} = 0` and `T_ijk != 0`.
pub fn order2_violations(p: &[u32], t: &CouplingTensor) -> Vec<Violation> {
    sorted_index_triples(p.len())
        .into_iter()
        .filter(|&[i, j, k]| a_entry(p[i], p[j], p[k]) == 0 && !t.is_zero(i, j, k))
        .map(|[i, j, k]| Violation {
            i,
            j,
            k,
            p_triple: [p[i], p[j], p[k]],
            value: t.get(i, j, k),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaloisClass {
    #[serde(rename = "C")]
    C,
    #[serde(rename = "C2")]
    C2,
}

impl GaloisClass {
    pub fn pv_field(self) -> &'static str {
        match self {
            GaloisClass::C => PV_FIELD_C,
            GaloisClass::C2 => PV_FIELD_C2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GaloisClass::C => "C",
            GaloisClass::C2 => "C2",
        }
    }
}

/// `C2` when `T` is nonzero on the `p = 0` eigenspace, or on two `p = 0`
/// directions and one `p = 1` direction; `C` otherwise.
pub fn galois_class(p: &[u32], t: &CouplingTensor) -> GaloisClass {
    let hit = sorted_index_triples(p.len()).into_iter().any(|[i, j, k]| {
        let mut ps = [p[i], p[j], p[k]];
        ps.sort_unstable();
        (ps == [0, 0, 0] || ps == [0, 0, 1]) && !t.is_zero(i, j, k)
    });
    if hit {
        GaloisClass::C2
    } else {
        GaloisClass::C
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fastpath {
    pub applied: bool,
    /// `k` with `p = 2k` for the eigenvalues other than one copy of `2`;
    /// empty when some `p` is odd or `2` is absent.
    pub b_set: Vec<u32>,
}

/// The shortcut: after dropping one `p = 2`, all `p` even and
/// `max(B) <= max(2 min(B) - 1, 0)` with `B = {p/2}`.
pub fn fastpath_corollary(p: &[u32]) -> Fastpath {
    let no = Fastpath {
        applied: false,
        b_set: Vec::new(),
    };
    let Some(pos) = p.iter().position(|&x| x == 2) else {
        return no;
    };
    let rest: Vec<u32> = p.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &x)| x).collect();
    if rest.iter().any(|x| x % 2 == 1) {
        return no;
    }
    let mut b: Vec<u32> = rest.iter().map(|x| x / 2).collect();
    b.sort_unstable();
    b.dedup();
    let applied = match (b.first(), b.last()) {
        (Some(&lo), Some(&hi)) => i64::from(hi) <= (2 * i64::from(lo) - 1).max(0),
        _ => true,
    };
    Fastpath { applied, b_set: b }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerCheck {
    pub consistent: bool,
    /// Largest relative defect over `|H c - 2 c|` and
    /// `|D^3 V(c)(X_a, X_b) + 3 lambda_a <X_a, X_b>|`.
    pub max_defect: f64,
}

/// Floating check of `H c = 2 c` and `D^3 V(c)(c, X_a, X_b) = -3 lambda_a <X_a, X_b>`.
pub fn euler_consistency(d: &Derivatives<Complex64>, c: &[Complex64], s: &Spectrum, tolerance: f64) -> EulerCheck {
    let n = d.dimension;
    let cn = hermitian_norm(c);
    let big = d.third.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        let hc: Complex64 = (0..n).map(|j| d.hessian[i][j] * c[j]).sum();
        let h_big = d.hessian[i].iter().map(|z| z.norm()).fold(1.0, f64::max);
        worst = worst.max((hc - 2.0 * c[i]).norm() / (h_big * cn.max(1.0)));
    }
    let mc = contract_first(&d.third, n, &[c.to_vec()]).remove(0);
    for a in 0..n {
        for b in 0..n {
            let lhs = bilinear_form(&mc, n, &s.vectors[a], &s.vectors[b]);
            let inner: Complex64 = s.vectors[a].iter().zip(&s.vectors[b]).map(|(x, y)| x * y).sum();
            let scale = big * cn.max(1.0) * hermitian_norm(&s.vectors[a]) * hermitian_norm(&s.vectors[b]);
            worst = worst.max((lhs + 3.0 * s.eigenvalues[a] * inner).norm() / scale.max(1.0));
        }
    }
    EulerCheck {
        consistent: worst <= tolerance * n.max(1) as f64 * 10.0,
        max_defect: worst,
    }
}

/// Exact check of the same identities on the unnormalized basis.
pub fn exact_euler_consistency(d: &Derivatives<Rational>, c: &[Rational], s: &ExactSpectrum) -> EulerCheck {
    let n = d.dimension;
    let two = Rational::from_integer(2.into());
    let three = Rational::from_integer(3.into());
    let mut ok = (0..n).all(|i| (0..n).map(|j| &d.hessian[i][j] * &c[j]).sum::<Rational>() == &two * &c[i]);
    let mc = contract_first(&d.third, n, &[c.to_vec()]).remove(0);
    for a in 0..n {
        for b in 0..n {
            let lhs = bilinear_form(&mc, n, &s.vectors[a], &s.vectors[b]);
            ok &= lhs + &three * &s.eigenvalues[a] * dot(&s.vectors[a], &s.vectors[b]) == Rational::zero();
        }
    }
    EulerCheck {
        consistent: ok,
        max_defect: if ok { 0.0 } else { 1.0 },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JordanStatus {
    Diagonalizable,
    Pass,
    Fail,
    Unresolvable,
}

/// Reading of the block-size constraint: nontrivial blocks only at
/// eigenvalue -1 and of size at most 2.
pub const JORDAN_NOTE: &str = "nontrivial Jordan blocks are admitted only at eigenvalue -1 with size at most 2";

/// Pass iff every eigenvalue has a p-index and every nontrivial block sits
/// at `p = 0` with size at most 2.
pub fn jordan_verdict(clusters: &[JordanCluster], int_tolerance: f64) -> JordanStatus {
    let ok = clusters.iter().all(|cl| match p_index(cl.eigenvalue, int_tolerance) {
        None => false,
        Some(0) => cl.sizes.iter().all(|&s| s <= 2),
        Some(_) => cl.is_trivial(),
    });
    if ok {
        JordanStatus::Pass
    } else {
        JordanStatus::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn p_indices() {
        assert_eq!(p_index(c(2.0), 1e-6), Some(2));
        assert_eq!(p_index(c(-1.0), 1e-6), Some(0));
        assert_eq!(p_index(c(0.0), 1e-6), Some(1));
        assert_eq!(p_index(c(1.0), 1e-6), None);
        assert_eq!(p_index(c(5.0), 1e-6), Some(3));
        assert_eq!(p_index(Complex64::new(2.0, 1e-3), 1e-6), None);
        assert_eq!(p_index(c(-2.0), 1e-6), None);
    }

    #[test]
    fn fastpath_arithmetic() {
        // B = {1}: p = 2 twice
        assert!(fastpath_corollary(&[2, 2]).applied);
        // B = {2, 3}
        let f = fastpath_corollary(&[2, 4, 6]);
        assert!(f.applied);
        assert_eq!(f.b_set, vec![2, 3]);
        // B = {1, 3}
        assert!(!fastpath_corollary(&[2, 2, 6]).applied);
        assert!(!fastpath_corollary(&[2, 1]).applied);
        assert!(!fastpath_corollary(&[0, 0]).applied);
        assert!(fastpath_corollary(&[2]).applied);
        assert!(fastpath_corollary(&[2, 0, 0]).applied);
        assert!(!fastpath_corollary(&[2, 0, 2]).applied);
    }

    #[test]
    fn jordan_rules() {
        let cl = |l: f64, sizes: Vec<usize>| JordanCluster { eigenvalue: c(l), sizes };
        assert_eq!(jordan_verdict(&[cl(2.0, vec![1]), cl(-1.0, vec![2])], 1e-6), JordanStatus::Pass);
        assert_eq!(jordan_verdict(&[cl(2.0, vec![2])], 1e-6), JordanStatus::Fail);
        assert_eq!(jordan_verdict(&[cl(-1.0, vec![3])], 1e-6), JordanStatus::Fail);
        assert_eq!(jordan_verdict(&[cl(1.0, vec![1]), cl(-1.0, vec![2])], 1e-6), JordanStatus::Fail);
    }

    #[test]
    fn galois_scan() {
        let t = CouplingTensor::build(2, vec![([1, 1, 1], c(6.0), false)]);
        assert_eq!(galois_class(&[2, 0], &t), GaloisClass::C2);
        assert_eq!(galois_class(&[2, 1], &t), GaloisClass::C);
        assert_eq!(order2_violations(&[2, 1], &t).len(), 1);
        assert!(order2_violations(&[2, 0], &t).is_empty());
    }
}
