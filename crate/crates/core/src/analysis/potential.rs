//! Homogeneous potentials of degree -1 and their first three derivatives.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use super::expr::{Expr, PoleError, Scalar};
use super::parse::{parse_expr_with_dimension, ParseError};
use super::ratfunc::RatFuncError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("potential is not homogeneous of degree -1 ({}); Euler defect sum q_i dV/dq_i + V = {defect}", degree_text(.degree))]
    NotHomogeneous { degree: Option<i64>, defect: String },
    #[error("potential is identically zero")]
    Zero,
    #[error("potential involves no variable")]
    NoVariables,
    #[error("potential: {0}")]
    Algebra(#[from] RatFuncError),
}

fn degree_text(d: &Option<i64>) -> String {
    match d {
        Some(d) => format!("degree {d}"),
        None => "not homogeneous".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialExpr {
    pub text: String,
    pub expr: Expr,
    pub dimension: usize,
}

/// Parses `text` and checks `sum_i q_i dV/dq_i = -V` symbolically.
pub fn parse_potential(text: &str) -> Result<PotentialExpr, PotentialError> {
    let (expr, dimension) = parse_expr_with_dimension(text)?;
    let rf = expr.to_ratfunc()?;
    if rf.is_zero() {
        return Err(PotentialError::Zero);
    }
    if dimension == 0 {
        return Err(PotentialError::NoVariables);
    }
    let defect = rf.euler_defect_numerator(dimension, -1)?;
    if !defect.is_zero() {
        let denom = rf.denom.mul(&rf.denom)?;
        return Err(PotentialError::NotHomogeneous {
            degree: rf.homogeneous_degree(),
            defect: format!("({defect})/({denom})"),
        });
    }
    Ok(PotentialExpr {
        text: text.trim().to_string(),
        expr,
        dimension,
    })
}

/// Symbolic gradient, Hessian and third derivatives, each computed once per
/// sorted multi-index.
#[derive(Clone, Debug)]
pub struct DerivativeSet {
    pub dimension: usize,
    pub potential: Expr,
    gradient: Vec<Expr>,
    hessian: HashMap<(usize, usize), Expr>,
    third: HashMap<(usize, usize, usize), Expr>,
}

fn sort2(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

fn sort3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let mut t = [i, j, k];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

impl DerivativeSet {
    pub fn new(v: &PotentialExpr) -> Self {
        let n = v.dimension;
        let gradient: Vec<Expr> = (0..n).map(|i| v.expr.derivative(i)).collect();
        let mut hessian = HashMap::new();
        for i in 0..n {
            for j in i..n {
                hessian.insert((i, j), gradient[i].derivative(j));
            }
        }
        let mut keys = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    keys.push((i, j, k));
                }
            }
        }
        let third = keys
            .into_par_iter()
            .map(|(i, j, k)| ((i, j, k), hessian[&(i, j)].derivative(k)))
            .collect();
        DerivativeSet {
            dimension: n,
            potential: v.expr.clone(),
            gradient,
            hessian,
            third,
        }
    }

    pub fn gradient_expr(&self, i: usize) -> &Expr {
        &self.gradient[i]
    }

    pub fn hessian_expr(&self, i: usize, j: usize) -> &Expr {
        &self.hessian[&sort2(i, j)]
    }

    pub fn third_expr(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.third[&sort3(i, j, k)]
    }

    pub fn gradient_at<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>, PoleError> {
        self.gradient.iter().map(|g| g.eval(point)).collect()
    }

    pub fn at<S: Scalar + Send + Sync>(&self, point: &[S]) -> Result<Derivatives<S>, PoleError> {
        let n = self.dimension;
        let value = self.potential.eval(point)?;
        let gradient = self.gradient_at(point)?;
        let mut hessian = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let h = self.hessian[&(i, j)].eval(point)?;
                hessian[i][j] = h.clone();
                hessian[j][i] = h;
            }
        }
        let entries: Result<Vec<_>, PoleError> = self
            .third
            .par_iter()
            .map(|(&k, e)| e.eval(point).map(|v| (k, v)))
            .collect();
        let mut third = vec![S::zero(); n * n * n];
        for ((i, j, k), v) in entries? {
            for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                third[(a * n + b) * n + c] = v.clone();
            }
        }
        Ok(Derivatives {
            dimension: n,
            value,
            gradient,
            hessian,
            third,
        })
    }
}

/// Values of `V`, `grad V`, `Hess V` and `D^3 V` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives<S> {
    pub dimension: usize,
    pub value: S,
    pub gradient: Vec<S>,
    pub hessian: Vec<Vec<S>>,
    /// Row-major `n x n x n`, fully symmetric.
    pub third: Vec<S>,
}

impl<S: Scalar> Derivatives<S> {
    pub fn third_at(&self, i: usize, j: usize, k: usize) -> &S {
        let n = self.dimension;
        &self.third[(i * n + j) * n + k]
    }

    /// `D^3 V (x, y, z)`.
    pub fn third_form(&self, x: &[S], y: &[S], z: &[S]) -> S {
        let n = self.dimension;
        let mut acc = S::zero();
        for a in 0..n {
            for b in 0..n {
                let xy = x[a].clone() * y[b].clone();
                for c in 0..n {
                    acc = acc + xy.clone() * z[c].clone() * self.third[(a * n + b) * n + c].clone();
                }
            }
        }
        acc
    }
}

/// Gradient, Hessian and third derivatives at `point`.
pub fn derivatives_at<S: Scalar + Send + Sync>(v: &PotentialExpr, point: &[S]) -> Result<Derivatives<S>, PoleError> {
    DerivativeSet::new(v).at(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn homogeneity() {
        assert_eq!(parse_potential("-1/q1").unwrap().dimension, 1);
        assert_eq!(parse_potential("1/(q1+q2)").unwrap().dimension, 2);
        match parse_potential("1/q1^2") {
            Err(PotentialError::NotHomogeneous { degree, .. }) => assert_eq!(degree, Some(-2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_potential("1/q1 + 1"), Err(PotentialError::NotHomogeneous { degree: None, .. })));
        assert_eq!(parse_potential("0*q1"), Err(PotentialError::Zero));
        assert_eq!(parse_potential("q1 - q1"), Err(PotentialError::Zero));
    }

    #[test]
    fn kepler_derivatives() {
        let v = parse_potential("-1/q1").unwrap();
        let d = derivatives_at(&v, &[int(-1)]).unwrap();
        assert_eq!(d.gradient, vec![int(1)]);
        assert_eq!(d.hessian, vec![vec![int(2)]]);
        assert_eq!(d.third, vec![int(6)]);
        // along X1 = c = (-1) the coupling is -6
        assert_eq!(d.third_form(&[int(-1)], &[int(-1)], &[int(-1)]), int(-6));
    }

    #[test]
    fn cubic_perturbation() {
        let v = parse_potential("-1/q1 + 3*q2^3/q1^4").unwrap();
        let d = derivatives_at(&v, &[int(-1), int(0)]).unwrap();
        assert_eq!(d.hessian, vec![vec![int(2), int(0)], vec![int(0), int(0)]]);
        assert_eq!(*d.third_at(1, 1, 1), int(18));
    }
}
