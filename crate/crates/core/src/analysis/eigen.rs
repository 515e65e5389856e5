//! Complex symmetric eigenproblems in floating point: eigenbases orthonormal
//! for the bilinear form `sum v_k w_k`, and Jordan structure when no such
//! basis exists.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use thiserror::Error;

use super::darboux::{bilinear, hermitian_norm};

pub type CMatrix = DMatrix<Complex64>;

/// Relative distance under which computed eigenvalues are one cluster.
const CLUSTER_COARSE: f64 = 1e-4;
const CLUSTER_FINE: f64 = 1e-9;
/// Relative singular value under which a direction is null.
const NULL_THRESHOLD: f64 = 1e-7;
/// Relative bilinear norm under which a vector is isotropic.
const ISOTROPIC: f64 = 1e-8;
/// Hermitian norm under which a projected unit vector is discarded.
const DEPENDENT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric (max |H - H^T| = {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("not diagonalizable: eigenvalue {eigenvalue} has multiplicity {algebraic} but {geometric} eigenvectors")]
    NotDiagonalizable {
        eigenvalue: Complex64,
        algebraic: usize,
        geometric: usize,
    },
    #[error("bilinear form degenerate on the eigenspace of {eigenvalue} (largest |<v,w>| = {largest:e})")]
    DegenerateBilinear { eigenvalue: Complex64, largest: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JordanError {
    #[error("Jordan structure unresolvable at eigenvalue {eigenvalue}: rank decisions change with the threshold")]
    Unresolvable { eigenvalue: Complex64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Eigenvalues with a bilinear-orthonormal eigenbasis `X_1..X_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenbasis {
    pub eigenvalues: Vec<Complex64>,
    /// `vectors[i]` is `X_{i+1}`.
    pub vectors: Vec<Vec<Complex64>>,
    /// `max_i sum_j |(P^T P - I)_ij|`.
    pub orthonormality_defect: f64,
    /// Largest off-diagonal `|(P^T H P)_ij|`.
    pub diagonal_defect: f64,
}

/// All blocks of one eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanCluster {
    pub eigenvalue: Complex64,
    /// Block sizes, largest first.
    pub sizes: Vec<usize>,
}

impl JordanCluster {
    pub fn is_trivial(&self) -> bool {
        self.sizes.iter().all(|&s| s == 1)
    }
}

pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix, EigenError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(EigenError::NotSquare);
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn scale_of(h: &CMatrix) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0)
}

fn symmetry_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            d = d.max((h[(i, j)] - h[(j, i)]).norm());
        }
    }
    d
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(h: &CMatrix) -> Result<Vec<Complex64>, EigenError> {
    if h.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(h.clone(), f64::EPSILON, 100_000).ok_or(EigenError::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..h.nrows()).map(|i| t[(i, i)]).collect())
}

/// Single-linkage clusters, each as indices into `values`.
fn cluster(values: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..values.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for a in 0..values.len() {
        for b in 0..a {
            if (values[a] - values[b]).norm() <= radius {
                let (ra, rb) = (root(&mut label, a), root(&mut label, b));
                label[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; values.len()];
    for i in 0..values.len() {
        let r = root(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn mean(values: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| values[i]).sum::<Complex64>() / idx.len() as f64
}

fn shifted(h: &CMatrix, mu: Complex64) -> CMatrix {
    let mut m = h.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= mu;
    }
    m
}

/// Right singular vectors of `m` with singular value at most `threshold`,
/// smallest first.
fn null_vectors(m: &CMatrix, threshold: f64) -> Vec<Vec<Complex64>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    order
        .into_iter()
        .filter(|&r| svd.singular_values[r] <= threshold)
        .map(|r| (0..n).map(|k| vt[(r, k)].conj()).collect())
        .collect()
}

fn rank(m: &CMatrix, threshold: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

struct Eigenspace {
    value: Complex64,
    multiplicity: usize,
    vectors: Vec<Vec<Complex64>>,
}

/// Clusters the spectrum and finds a full eigenspace per cluster, splitting
/// coarse clusters whose nullity falls short.
fn eigenspaces(h: &CMatrix) -> Result<Vec<Eigenspace>, EigenError> {
    let scale = scale_of(h);
    let values = eigenvalues(h)?;
    let mut out = Vec::new();
    for group in cluster(&values, CLUSTER_COARSE * scale) {
        let spaces = match full_eigenspace(h, &values, &group, scale) {
            Ok(s) => vec![s],
            Err(short) => {
                let sub: Vec<Vec<usize>> = cluster(&group.iter().map(|&i| values[i]).collect::<Vec<_>>(), CLUSTER_FINE * scale)
                    .into_iter()
                    .map(|g| g.into_iter().map(|i| group[i]).collect())
                    .collect();
                if sub.len() == 1 {
                    return Err(short);
                }
                sub.iter()
                    .map(|g| full_eigenspace(h, &values, g, scale))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| short)?
            }
        };
        out.extend(spaces);
    }
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(out)
}

fn full_eigenspace(h: &CMatrix, values: &[Complex64], group: &[usize], scale: f64) -> Result<Eigenspace, EigenError> {
    let mu = mean(values, group);
    let m = group.len();
    let mut vectors = null_vectors(&shifted(h, mu), NULL_THRESHOLD * scale);
    if vectors.len() < m {
        return Err(EigenError::NotDiagonalizable {
            eigenvalue: mu,
            algebraic: m,
            geometric: vectors.len(),
        });
    }
    vectors.truncate(m);
    Ok(Eigenspace {
        value: mu,
        multiplicity: m,
        vectors,
    })
}

fn sub_scaled(w: &mut [Complex64], x: &[Complex64], k: Complex64) {
    for (wi, xi) in w.iter_mut().zip(x) {
        *wi -= k * xi;
    }
}

/// Bilinear Gram-Schmidt with pivoting on `|<v,v>|`; isotropic leftovers are
/// replaced by `a + b`, `a - b` for a pair with `<a,b>` nonzero.
fn orthonormalize(
    value: Complex64,
    mut pool: Vec<Vec<Complex64>>,
    want: usize,
    first: Option<&[Complex64]>,
) -> Result<Vec<Vec<Complex64>>, EigenError> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(want);
    let accept = |x: Vec<Complex64>, pool: &mut Vec<Vec<Complex64>>, out: &mut Vec<Vec<Complex64>>| {
        let norm = bilinear(&x, &x).sqrt();
        let x: Vec<Complex64> = x.iter().map(|v| v / norm).collect();
        for w in pool.iter_mut() {
            let k = bilinear(w, &x);
            sub_scaled(w, &x, k);
        }
        out.push(x);
    };
    if let Some(c) = first {
        accept(c.to_vec(), &mut pool, &mut out);
    }
    while out.len() < want {
        pool.retain(|v| hermitian_norm(v) > DEPENDENT);
        let ratio = |v: &Vec<Complex64>| bilinear(v, v).norm() / hermitian_norm(v).powi(2);
        let best = (0..pool.len()).max_by(|&a, &b| ratio(&pool[a]).total_cmp(&ratio(&pool[b])));
        let Some(best) = best else {
            return Err(EigenError::DegenerateBilinear { eigenvalue: value, largest: 0.0 });
        };
        if ratio(&pool[best]) >= ISOTROPIC {
            let x = pool.swap_remove(best);
            accept(x, &mut pool, &mut out);
            continue;
        }
        let mut pair = None;
        let mut largest = 0.0f64;
        for a in 0..pool.len() {
            for b in 0..a {
                let r = bilinear(&pool[a], &pool[b]).norm() / (hermitian_norm(&pool[a]) * hermitian_norm(&pool[b]));
                if r > largest {
                    largest = r;
                    pair = Some((a, b));
                }
            }
        }
        match pair {
            Some((a, b)) if largest >= ISOTROPIC => {
                let sum: Vec<Complex64> = pool[a].iter().zip(&pool[b]).map(|(x, y)| x + y).collect();
                let diff: Vec<Complex64> = pool[a].iter().zip(&pool[b]).map(|(x, y)| x - y).collect();
                pool[a] = sum;
                pool[b] = diff;
            }
            _ => return Err(EigenError::DegenerateBilinear { eigenvalue: value, largest }),
        }
    }
    Ok(out)
}

/// Bilinear-orthonormal eigenbasis of a complex symmetric `h`.
pub fn orthonormal_eigenbasis(h: &CMatrix, tolerance: f64) -> Result<Eigenbasis, EigenError> {
    orthonormal_eigenbasis_aligned(h, tolerance, None)
}

/// As [`orthonormal_eigenbasis`]; when `first` is a non-isotropic
/// eigenvector, `X_1` is `first / sqrt(<first, first>)` and its eigenspace is
/// listed first.
pub fn orthonormal_eigenbasis_aligned(
    h: &CMatrix,
    tolerance: f64,
    first: Option<&[Complex64]>,
) -> Result<Eigenbasis, EigenError> {
    if !h.is_square() {
        return Err(EigenError::NotSquare);
    }
    let scale = scale_of(h);
    let defect = symmetry_defect(h);
    if defect > tolerance * scale {
        return Err(EigenError::NotSymmetric { defect });
    }
    let mut spaces = eigenspaces(h)?;
    let mut first_space = None;
    if let Some(c) = first {
        let cn = hermitian_norm(c);
        let cc = bilinear(c, c);
        if cn > 0.0 && cc.norm() >= ISOTROPIC * cn * cn {
            let hc: Vec<Complex64> = (0..h.nrows()).map(|i| (0..h.ncols()).map(|j| h[(i, j)] * c[j]).sum()).collect();
            first_space = spaces.iter().position(|s| {
                let r: Vec<Complex64> = hc.iter().zip(c).map(|(a, b)| a - s.value * b).collect();
                hermitian_norm(&r) <= NULL_THRESHOLD * scale * cn
            });
        }
    }
    if let Some(p) = first_space {
        let s = spaces.remove(p);
        spaces.insert(0, s);
    }
    let mut eigenvalues = Vec::with_capacity(h.nrows());
    let mut vectors = Vec::with_capacity(h.nrows());
    for (idx, s) in spaces.into_iter().enumerate() {
        let lead = if idx == 0 && first_space.is_some() { first } else { None };
        let basis = orthonormalize(s.value, s.vectors, s.multiplicity, lead)?;
        for v in basis {
            eigenvalues.push(s.value);
            vectors.push(v);
        }
    }
    let (orthonormality_defect, diagonal_defect) = defects(h, &vectors);
    Ok(Eigenbasis {
        eigenvalues,
        vectors,
        orthonormality_defect,
        diagonal_defect,
    })
}

/// `(max row sum of |P^T P - I|, max off-diagonal |P^T H P|)`.
pub fn defects(h: &CMatrix, vectors: &[Vec<Complex64>]) -> (f64, f64) {
    let n = vectors.len();
    let p = CMatrix::from_fn(h.nrows(), n, |i, j| vectors[j][i]);
    let gram = p.transpose() * &p;
    let d = p.transpose() * h * &p;
    let mut ortho = 0.0f64;
    let mut off = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            row += (gram[(i, j)] - target).norm();
            if i != j {
                off = off.max(d[(i, j)].norm());
            }
        }
        ortho = ortho.max(row);
    }
    (ortho, off)
}

fn block_sizes(h: &CMatrix, mu: Complex64, m: usize, threshold: f64, scale: f64) -> Option<Vec<usize>> {
    let n = h.nrows();
    let a = shifted(h, mu);
    let mut ranks = vec![n];
    let mut power = CMatrix::identity(n, n);
    for k in 1..=m + 1 {
        power = &power * &a;
        ranks.push(rank(&power, threshold * scale.powi(k as i32)));
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    let at_least: Vec<usize> = (1..=m + 1)
        .map(|k| ranks[k - 1].checked_sub(ranks[k]))
        .collect::<Option<Vec<_>>>()?;
    let mut sizes = Vec::new();
    for k in 1..=m {
        let exactly = at_least[k - 1].checked_sub(at_least[k])?;
        sizes.extend(std::iter::repeat_n(k, exactly));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    (sizes.iter().sum::<usize>() == m && ranks[m] == n - m).then_some(sizes)
}

/// Jordan block sizes per eigenvalue from ranks of `(H - mu)^k`; the
/// decision must not move when the rank threshold is scaled by 100 either way.
pub fn jordan_structure(h: &CMatrix) -> Result<Vec<JordanCluster>, JordanError> {
    if !h.is_square() {
        return Err(EigenError::NotSquare.into());
    }
    let scale = scale_of(h);
    let values = eigenvalues(h)?;
    let mut out = Vec::new();
    for group in cluster(&values, CLUSTER_COARSE * scale) {
        let mu = mean(&values, &group);
        let m = group.len();
        let results: Vec<Option<Vec<usize>>> = [NULL_THRESHOLD / 100.0, NULL_THRESHOLD, NULL_THRESHOLD * 100.0]
            .iter()
            .map(|&t| block_sizes(h, mu, m, t, scale))
            .collect();
        match &results[1] {
            Some(s) if results.iter().all(|r| r.as_ref() == Some(s)) => out.push(JordanCluster {
                eigenvalue: mu,
                sizes: s.clone(),
            }),
            _ => return Err(JordanError::Unresolvable { eigenvalue: mu }),
        }
    }
    out.sort_by(|a, b| a.eigenvalue.re.total_cmp(&b.eigenvalue.re).then(a.eigenvalue.im.total_cmp(&b.eigenvalue.im)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity() {
        let h = CMatrix::identity(3, 3);
        let e = orthonormal_eigenbasis(&h, 1e-9).unwrap();
        assert!(e.eigenvalues.iter().all(|l| (l - c(1.0, 0.0)).norm() < 1e-12));
        assert!(e.orthonormality_defect < 1e-12);
    }

    #[test]
    fn complex_rotation() {
        let th = c(0.3, 0.7);
        let o = CMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]));
        let h = o.transpose() * d * &o;
        let e = orthonormal_eigenbasis(&h, 1e-9).unwrap();
        assert!((e.eigenvalues[0]).norm() < 1e-12);
        assert!((e.eigenvalues[1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(e.orthonormality_defect < 1e-10);
        assert!(e.diagonal_defect < 1e-9);
    }

    #[test]
    fn nilpotent_rejected() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert!(matches!(
            orthonormal_eigenbasis(&h, 1e-9),
            Err(EigenError::NotDiagonalizable { algebraic: 2, geometric: 1, .. })
        ));
        let j = jordan_structure(&h).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].sizes, vec![2]);
        assert!(j[0].eigenvalue.norm() < 1e-6);
    }

    #[test]
    fn aligned_first_vector() {
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]));
        let v = [c(3.0, 0.0), c(4.0, 0.0), c(0.0, 0.0)];
        let e = orthonormal_eigenbasis_aligned(&h, 1e-9, Some(&v)).unwrap();
        assert!((e.vectors[0][0] - c(0.6, 0.0)).norm() < 1e-12);
        assert!((e.vectors[0][1] - c(0.8, 0.0)).norm() < 1e-12);
        assert!((e.eigenvalues[2] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(e.orthonormality_defect < 1e-12);
    }

    #[test]
    fn isotropic_pair_repaired() {
        // eigenspace of 0 spanned by isotropic (1, i, 0) and (1, -i, 0)
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        let iso = vec![vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]];
        let b = orthonormalize(c(0.0, 0.0), iso, 2, None).unwrap();
        let (o, _) = defects(&h.view((0, 0), (3, 3)).into_owned(), &b);
        assert!(o < 1e-12, "{o}");
    }
}
