//! Darboux points `grad V(c) = alpha c` and the rescaling to `alpha = -1`.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::parse::ExactComplex;
use super::potential::DerivativeSet;
use crate::exact::{int, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarbouxError {
    #[error("point has {got} components, potential has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is zero")]
    ZeroPoint,
    #[error("point is a pole of V or of a needed derivative")]
    Pole,
    #[error("not a Darboux point: |grad V(c) - alpha c| = {residual:e} with alpha = {multiplier}")]
    NotDarboux { residual: f64, multiplier: Complex64 },
    #[error("degenerate Darboux point (multiplier 0)")]
    DegenerateMultiplier,
}

/// Coordinates of a point, exact when every component is a real rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Exact(Vec<Rational>),
    Float(Vec<Complex64>),
}

impl Point {
    pub fn from_components(c: &[ExactComplex]) -> Point {
        if c.iter().all(ExactComplex::is_real) {
            Point::Exact(c.iter().map(|z| z.re.clone()).collect())
        } else {
            Point::Float(c.iter().map(ExactComplex::to_complex64).collect())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Point::Exact(v) => v.len(),
            Point::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Point::Exact(v) => v.iter().map(rat_to_c64).collect(),
            Point::Float(v) => v.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Point::Exact(_))
    }
}

/// A multiplier, exact alongside an exact point.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    Exact(Rational),
    Float(Complex64),
}

impl Multiplier {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Multiplier::Exact(r) => rat_to_c64(r),
            Multiplier::Float(z) => *z,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxPoint {
    pub c: Point,
    pub multiplier: Multiplier,
    /// `|grad V(c) - alpha c|`, zero for an exact point.
    pub residual: f64,
}

pub(crate) fn rat_to_c64(r: &Rational) -> Complex64 {
    Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
}

pub(crate) fn bilinear(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn hermitian_norm(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn exact_dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks `grad V(c) = alpha c`.
///
/// A real rational point whose residual vanishes exactly stays exact; any
/// other point is checked in floating point against
/// `tolerance * max(1, |grad V(c)|)`.
pub fn verify_darboux(dv: &DerivativeSet, c: &Point, tolerance: f64) -> Result<DarbouxPoint, DarbouxError> {
    if c.len() != dv.dimension {
        return Err(DarbouxError::DimensionMismatch {
            expected: dv.dimension,
            got: c.len(),
        });
    }
    if let Point::Exact(q) = c {
        if q.iter().all(Zero::is_zero) {
            return Err(DarbouxError::ZeroPoint);
        }
        let g = dv.gradient_at(q).map_err(|_| DarbouxError::Pole)?;
        let alpha = exact_dot(&g, q) / exact_dot(q, q);
        if g.iter().zip(q).all(|(gi, qi)| *gi == &alpha * qi) {
            if alpha.is_zero() {
                return Err(DarbouxError::DegenerateMultiplier);
            }
            return Ok(DarbouxPoint {
                c: c.clone(),
                multiplier: Multiplier::Exact(alpha),
                residual: 0.0,
            });
        }
    }
    let z = c.to_complex();
    if z.iter().all(|x| x.norm() == 0.0) {
        return Err(DarbouxError::ZeroPoint);
    }
    let g = dv.gradient_at(&z).map_err(|_| DarbouxError::Pole)?;
    let alpha = float_multiplier(&g, &z);
    let residual = hermitian_norm(&g.iter().zip(&z).map(|(gi, zi)| gi - alpha * zi).collect::<Vec<_>>());
    let scale = hermitian_norm(&g).max(1.0);
    if !(residual <= tolerance * scale) {
        return Err(DarbouxError::NotDarboux {
            residual,
            multiplier: alpha,
        });
    }
    if alpha.norm() <= tolerance * scale {
        return Err(DarbouxError::DegenerateMultiplier);
    }
    Ok(DarbouxPoint {
        c: Point::Float(z),
        multiplier: Multiplier::Float(alpha),
        residual,
    })
}

/// `<g,c>/<c,c>`, or the component ratio at the largest `|c_k|` when `c` is
/// (nearly) isotropic.
fn float_multiplier(g: &[Complex64], c: &[Complex64]) -> Complex64 {
    let cc = bilinear(c, c);
    let h = hermitian_norm(c);
    if cc.norm() > 1e-8 * h * h {
        return bilinear(g, c) / cc;
    }
    let k = (0..c.len())
        .max_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm()))
        .unwrap_or(0);
    g[k] / c[k]
}

/// Exact cube root of a rational, if it has one.
pub fn rational_cube_root(x: &Rational) -> Option<Rational> {
    fn icbrt(n: &num_bigint::BigInt) -> Option<num_bigint::BigInt> {
        let r = n.cbrt();
        (&r * &r * &r == *n).then_some(r)
    }
    Some(Rational::new(icbrt(x.numer())?, icbrt(x.denom())?))
}

/// Cube root of `-alpha`: real when `-alpha` is real, principal otherwise.
pub fn scale_factor(alpha: Complex64) -> Complex64 {
    let m = -alpha;
    if m.im == 0.0 {
        Complex64::new(m.re.cbrt(), 0.0)
    } else {
        m.powf(1.0 / 3.0)
    }
}

/// Rescales `c` to `s c` with `s^3 = -alpha`, so that `grad V(s c) = -s c`,
/// and verifies the result.
pub fn normalize_multiplier(dv: &DerivativeSet, d: &DarbouxPoint, tolerance: f64) -> Result<DarbouxPoint, DarbouxError> {
    normalize_with(dv, d, tolerance, None)
}

/// As [`normalize_multiplier`], with the cube root multiplied by `root`
/// (a cube root of unity) in floating mode.
pub fn normalize_with(
    dv: &DerivativeSet,
    d: &DarbouxPoint,
    tolerance: f64,
    root: Option<Complex64>,
) -> Result<DarbouxPoint, DarbouxError> {
    if let (Point::Exact(q), Multiplier::Exact(alpha), None) = (&d.c, &d.multiplier, root) {
        if alpha.is_zero() {
            return Err(DarbouxError::DegenerateMultiplier);
        }
        if let Some(s) = rational_cube_root(&-alpha) {
            let scaled: Vec<Rational> = q.iter().map(|x| x * &s).collect();
            let g = dv.gradient_at(&scaled).map_err(|_| DarbouxError::Pole)?;
            let minus_one = int(-1);
            if g.iter().zip(&scaled).all(|(gi, qi)| *gi == &minus_one * qi) {
                return Ok(DarbouxPoint {
                    c: Point::Exact(scaled),
                    multiplier: Multiplier::Exact(minus_one),
                    residual: 0.0,
                });
            }
            return Err(DarbouxError::NotDarboux {
                residual: f64::NAN,
                multiplier: Complex64::new(-1.0, 0.0),
            });
        }
    }
    let alpha = d.multiplier.to_complex();
    if alpha.norm() == 0.0 {
        return Err(DarbouxError::DegenerateMultiplier);
    }
    let s = scale_factor(alpha) * root.unwrap_or(Complex64::new(1.0, 0.0));
    let scaled: Vec<Complex64> = d.c.to_complex().iter().map(|x| x * s).collect();
    let g = dv.gradient_at(&scaled).map_err(|_| DarbouxError::Pole)?;
    let residual = hermitian_norm(&g.iter().zip(&scaled).map(|(gi, zi)| gi + zi).collect::<Vec<_>>());
    if !(residual <= tolerance * hermitian_norm(&g).max(1.0)) {
        return Err(DarbouxError::NotDarboux {
            residual,
            multiplier: Complex64::new(-1.0, 0.0),
        });
    }
    Ok(DarbouxPoint {
        c: Point::Float(scaled),
        multiplier: Multiplier::Float(Complex64::new(-1.0, 0.0)),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::potential::parse_potential;
    use crate::exact::rat;

    fn kepler() -> DerivativeSet {
        DerivativeSet::new(&parse_potential("-1/q1").unwrap())
    }

    #[test]
    fn multipliers_on_the_ray() {
        let dv = kepler();
        let d = verify_darboux(&dv, &Point::Exact(vec![int(-1)]), 1e-9).unwrap();
        assert_eq!(d.multiplier, Multiplier::Exact(int(-1)));
        let d = verify_darboux(&dv, &Point::Exact(vec![int(1)]), 1e-9).unwrap();
        assert_eq!(d.multiplier, Multiplier::Exact(int(1)));
        let n = normalize_multiplier(&dv, &d, 1e-9).unwrap();
        assert_eq!(n.c, Point::Exact(vec![int(-1)]));
        let d = verify_darboux(&dv, &Point::Exact(vec![int(2)]), 1e-9).unwrap();
        assert_eq!(d.multiplier, Multiplier::Exact(rat(1, 8)));
        let n = normalize_multiplier(&dv, &d, 1e-9).unwrap();
        assert_eq!(n.c, Point::Exact(vec![int(-1)]));
    }

    #[test]
    fn non_cube_multiplier_goes_floating() {
        let dv = kepler();
        let d = verify_darboux(&dv, &Point::Exact(vec![int(3)]), 1e-9).unwrap();
        assert_eq!(d.multiplier, Multiplier::Exact(rat(1, 27)));
        // V = -2/q1 at c = (1): alpha = 2 has no rational cube root
        let dv = DerivativeSet::new(&parse_potential("-2/q1").unwrap());
        let d = verify_darboux(&dv, &Point::Exact(vec![int(1)]), 1e-9).unwrap();
        assert_eq!(d.multiplier, Multiplier::Exact(int(2)));
        let n = normalize_multiplier(&dv, &d, 1e-9).unwrap();
        match n.c {
            Point::Float(z) => assert!((z[0] - Complex64::new(-(2f64.cbrt()), 0.0)).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejections() {
        let dv = DerivativeSet::new(&parse_potential("1/(q1+q2)").unwrap());
        assert!(matches!(
            verify_darboux(&dv, &Point::Exact(vec![int(1), int(2)]), 1e-9),
            Err(DarbouxError::NotDarboux { .. })
        ));
        assert_eq!(
            verify_darboux(&dv, &Point::Exact(vec![int(0), int(0)]), 1e-9),
            Err(DarbouxError::ZeroPoint)
        );
        assert_eq!(
            verify_darboux(&dv, &Point::Exact(vec![int(1), int(-1)]), 1e-9),
            Err(DarbouxError::Pole)
        );
        assert!(matches!(
            verify_darboux(&dv, &Point::Exact(vec![int(1)]), 1e-9),
            Err(DarbouxError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complex_point() {
        // grad V(c) = alpha c with c = (i): 1/c^2 = -1 = alpha * i gives alpha = i
        let dv = kepler();
        let d = verify_darboux(&dv, &Point::Float(vec![Complex64::new(0.0, 1.0)]), 1e-9).unwrap();
        assert!((d.multiplier.to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let n = normalize_multiplier(&dv, &d, 1e-9).unwrap();
        assert!(n.residual < 1e-12);
    }
}
