//! One potential, one or more Darboux candidates, one report per candidate.

use std::time::Instant;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::darboux::{normalize_multiplier, verify_darboux, Multiplier, Point};
use super::eigen::{self, orthonormal_eigenbasis_aligned, CMatrix, EigenError, JordanError};
use super::exact_eigen::{exact_spectrum, lambda_of_p, ExactSpectrum, Unmatched};
use super::parse::parse_point;
use super::potential::{parse_potential, DerivativeSet, Derivatives, PotentialError, PotentialExpr};
use super::report::{
    AnalysisReport, BlockReport, ComplexValue, DarbouxReport, GaloisReport, JordanReport, Mode, Order1Report,
    Order2Report, Order2Verdict, Outcome, PassFail, SpectrumReport, Timings, ViolationReport,
};
use super::verdict::{
    coupling_tensor, euler_consistency, exact_coupling_tensor, exact_euler_consistency, fastpath_corollary,
    galois_class, jordan_verdict, order1_failures, order2_violations, spectrum_indices, CouplingTensor, JordanStatus,
    Spectrum, Violation, JORDAN_NOTE,
};
use crate::exact::Rational;

/// Largest acceptable `|P^T P - I|` before a conditioning warning.
const CONDITIONING_WARNING: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Residual tolerance (Darboux equation, zero tensor entries).
    pub tolerance: f64,
    /// Tolerance for recognising integer p-indices.
    pub int_tolerance: f64,
    /// Analyze rational points in floating point as well.
    pub force_floating: bool,
    pub timings: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tolerance: 1e-9,
            int_tolerance: 1e-6,
            force_floating: false,
            timings: false,
        }
    }
}

/// A parsed potential with its symbolic derivatives.
pub struct Analyzer {
    potential: PotentialExpr,
    derivatives: DerivativeSet,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn point_values(p: &Point) -> Vec<ComplexValue> {
    match p {
        Point::Exact(v) => v.iter().map(ComplexValue::exact).collect(),
        Point::Float(v) => v.iter().map(|z| ComplexValue::float(*z)).collect(),
    }
}

fn multiplier_value(m: &Multiplier) -> ComplexValue {
    match m {
        Multiplier::Exact(r) => ComplexValue::exact(r),
        Multiplier::Float(z) => ComplexValue::float(*z),
    }
}

fn violation_reports(v: &[Violation]) -> Vec<ViolationReport> {
    v.iter()
        .map(|v| ViolationReport {
            i: v.i + 1,
            j: v.j + 1,
            k: v.k + 1,
            p_triple: v.p_triple,
            value: ComplexValue::float(v.value),
            magnitude: v.value.norm(),
        })
        .collect()
}

/// Tensor-based part shared by both modes.
struct Order2Parts {
    violations: Vec<Violation>,
    tensor: CouplingTensor,
}

impl Analyzer {
    pub fn new(text: &str) -> Result<Self, PotentialError> {
        let potential = parse_potential(text)?;
        let derivatives = DerivativeSet::new(&potential);
        Ok(Analyzer {
            potential,
            derivatives,
        })
    }

    pub fn potential(&self) -> &PotentialExpr {
        &self.potential
    }

    pub fn derivatives(&self) -> &DerivativeSet {
        &self.derivatives
    }

    fn blank(&self, echo: &str) -> AnalysisReport {
        let mut r = AnalysisReport::input_error(&self.potential.text, Some(echo), String::new());
        r.error = None;
        r.dimension = Some(self.potential.dimension);
        r
    }

    /// Parses `point_text` and analyzes there.
    pub fn analyze_point(&self, point_text: &str, opts: &AnalysisOptions) -> AnalysisReport {
        match parse_point(point_text) {
            Ok(c) => self.analyze_at(&Point::from_components(&c), point_text.trim(), opts),
            Err(e) => {
                let mut r = self.blank(point_text.trim());
                r.error = Some(format!("Darboux point: {e}"));
                r.outcome = Outcome::InputError;
                r
            }
        }
    }

    pub fn analyze_at(&self, point: &Point, echo: &str, opts: &AnalysisOptions) -> AnalysisReport {
        let total = Instant::now();
        let mut r = self.blank(echo);
        let point = if opts.force_floating {
            Point::Float(point.to_complex())
        } else {
            point.clone()
        };
        let dv = &self.derivatives;
        let normalized = verify_darboux(dv, &point, opts.tolerance).and_then(|d| {
            let n = normalize_multiplier(dv, &d, opts.tolerance)?;
            Ok((d, n))
        });
        let (d, n) = match normalized {
            Ok(x) => x,
            Err(e) => {
                r.error = Some(format!("Darboux point: {e}"));
                r.outcome = Outcome::InputError;
                return r;
            }
        };
        let darboux_ms = ms(total);
        r.darboux = Some(DarbouxReport {
            supplied: point_values(&point),
            multiplier: multiplier_value(&d.multiplier),
            normalized: point_values(&n.c),
            residual: d.residual,
        });
        let mut times = [darboux_ms, 0.0, 0.0, 0.0];
        match &n.c {
            Point::Exact(q) => {
                r.mode = Some(Mode::Exact);
                self.exact_branch(&mut r, q, &mut times);
            }
            Point::Float(z) => {
                r.mode = Some(Mode::Floating);
                self.float_branch(&mut r, z, opts, &mut times);
            }
        }
        finish(&mut r);
        if opts.timings {
            r.timings = Some(Timings {
                darboux_ms: times[0],
                derivatives_ms: times[1],
                spectrum_ms: times[2],
                verdicts_ms: times[3],
                total_ms: ms(total),
            });
        }
        r
    }

    fn exact_branch(&self, r: &mut AnalysisReport, q: &[Rational], times: &mut [f64; 4]) {
        let t = Instant::now();
        let d: Derivatives<Rational> = match self.derivatives.at(q) {
            Ok(d) => d,
            Err(_) => {
                r.error = Some("normalized Darboux point is a pole of a derivative".into());
                return;
            }
        };
        times[1] = ms(t);
        let t = Instant::now();
        let spectrum = exact_spectrum(&d.hessian, Some(q));
        times[2] = ms(t);
        let t = Instant::now();
        match spectrum {
            Ok(es) => {
                r.spectrum = Some(SpectrumReport {
                    eigenvalues: es.eigenvalues.iter().map(ComplexValue::exact).collect(),
                    p_indices: es.p_indices.iter().map(|&p| Some(p)).collect(),
                });
                r.order1 = Some(Order1Report {
                    verdict: PassFail::Pass,
                    failing_eigenvalues: Vec::new(),
                });
                let tensor = exact_coupling_tensor(&d, &es);
                let parts = Order2Parts {
                    violations: order2_violations(&es.p_indices, &tensor),
                    tensor,
                };
                r.euler = Some(exact_euler_consistency(&d, q, &es));
                self.order2_reports(r, &es.p_indices, &parts);
                r.jordan = Some(diagonal_jordan());
                check_homothetic(r, &es);
            }
            Err(un) => self.exact_order1_failure(r, &d, &un),
        }
        times[3] = ms(t);
    }

    fn exact_order1_failure(&self, r: &mut AnalysisReport, d: &Derivatives<Rational>, un: &Unmatched) {
        let h = CMatrix::from_fn(d.dimension, d.dimension, |i, j| {
            Complex64::new(d.hessian[i][j].to_f64().unwrap_or(f64::NAN), 0.0)
        });
        let mut rest = eigen::eigenvalues(&h).unwrap_or_default();
        let mut eigenvalues = Vec::new();
        let mut p_indices = Vec::new();
        for &(p, m) in &un.matched {
            let lambda = lambda_of_p(p);
            let target = lambda.to_f64().unwrap_or(f64::NAN);
            for _ in 0..m {
                if let Some(pos) = (0..rest.len()).min_by(|&a, &b| {
                    (rest[a].re - target).abs().total_cmp(&(rest[b].re - target).abs())
                }) {
                    rest.remove(pos);
                }
                eigenvalues.push(ComplexValue::exact(&lambda));
                p_indices.push(Some(p));
            }
        }
        rest.sort_by(|a, b| a.re.total_cmp(&b.re));
        let failing: Vec<ComplexValue> = rest.iter().map(|z| ComplexValue::float(Complex64::new(z.re, 0.0))).collect();
        eigenvalues.extend(failing.iter().cloned());
        p_indices.extend(failing.iter().map(|_| None));
        r.spectrum = Some(SpectrumReport { eigenvalues, p_indices });
        r.order1 = Some(Order1Report {
            verdict: PassFail::Fail,
            failing_eigenvalues: failing,
        });
        r.order2 = Some(Order2Report {
            verdict: Order2Verdict::Skipped,
            violations: Vec::new(),
        });
        r.jordan = Some(diagonal_jordan());
        r.warnings.push(format!(
            "characteristic polynomial keeps a factor of degree {} with no root of the form (p-1)(p+2)/2",
            un.remainder.degree().unwrap_or(0)
        ));
    }

    fn float_branch(
        &self,
        r: &mut AnalysisReport,
        z: &[Complex64],
        opts: &AnalysisOptions,
        times: &mut [f64; 4],
    ) {
        let t = Instant::now();
        let d: Derivatives<Complex64> = match self.derivatives.at(z) {
            Ok(d) => d,
            Err(_) => {
                r.error = Some("normalized Darboux point is a pole of a derivative".into());
                return;
            }
        };
        times[1] = ms(t);
        let t = Instant::now();
        let h = CMatrix::from_fn(d.dimension, d.dimension, |i, j| d.hessian[i][j]);
        let basis = orthonormal_eigenbasis_aligned(&h, opts.tolerance, Some(z));
        times[2] = ms(t);
        let t = Instant::now();
        match basis {
            Ok(eb) => {
                if eb.orthonormality_defect > CONDITIONING_WARNING || eb.diagonal_defect > CONDITIONING_WARNING {
                    r.warnings.push(format!(
                        "eigenbasis poorly conditioned: |P^T P - I| = {:e}, off-diagonal of P^T H P = {:e}",
                        eb.orthonormality_defect, eb.diagonal_defect
                    ));
                }
                let p = spectrum_indices(&eb.eigenvalues, opts.int_tolerance);
                let failing = order1_failures(&eb.eigenvalues, &p);
                r.spectrum = Some(SpectrumReport {
                    eigenvalues: eb.eigenvalues.iter().map(|l| ComplexValue::float(*l)).collect(),
                    p_indices: p.clone(),
                });
                r.jordan = Some(diagonal_jordan());
                if !failing.is_empty() {
                    r.order1 = Some(Order1Report {
                        verdict: PassFail::Fail,
                        failing_eigenvalues: failing.iter().map(|l| ComplexValue::float(*l)).collect(),
                    });
                    r.order2 = Some(Order2Report {
                        verdict: Order2Verdict::Skipped,
                        violations: Vec::new(),
                    });
                } else {
                    r.order1 = Some(Order1Report {
                        verdict: PassFail::Pass,
                        failing_eigenvalues: Vec::new(),
                    });
                    let p: Vec<u32> = p.into_iter().flatten().collect();
                    let spectrum = Spectrum {
                        eigenvalues: eb.eigenvalues.clone(),
                        vectors: eb.vectors.clone(),
                        p_indices: p.iter().map(|&x| Some(x)).collect(),
                    };
                    let tensor = coupling_tensor(&d, &eb.vectors, opts.tolerance);
                    let parts = Order2Parts {
                        violations: order2_violations(&p, &tensor),
                        tensor,
                    };
                    r.euler = Some(euler_consistency(&d, z, &spectrum, opts.tolerance));
                    self.order2_reports(r, &p, &parts);
                }
            }
            Err(EigenError::NotDiagonalizable { .. }) => self.jordan_branch(r, &h, opts),
            Err(e) => {
                r.warnings.push(format!("eigenbasis: {e}"));
                r.order2 = Some(Order2Report {
                    verdict: Order2Verdict::Unavailable,
                    violations: Vec::new(),
                });
            }
        }
        times[3] = ms(t);
    }

    fn jordan_branch(&self, r: &mut AnalysisReport, h: &CMatrix, opts: &AnalysisOptions) {
        let unavailable = Order2Report {
            verdict: Order2Verdict::Unavailable,
            violations: Vec::new(),
        };
        match eigen::jordan_structure(h) {
            Ok(clusters) => {
                let status = jordan_verdict(&clusters, opts.int_tolerance);
                let mut eigenvalues = Vec::new();
                for cl in &clusters {
                    let m: usize = cl.sizes.iter().sum();
                    eigenvalues.extend(std::iter::repeat_n(cl.eigenvalue, m));
                }
                let p = spectrum_indices(&eigenvalues, opts.int_tolerance);
                let failing = order1_failures(&eigenvalues, &p);
                r.spectrum = Some(SpectrumReport {
                    eigenvalues: eigenvalues.iter().map(|l| ComplexValue::float(*l)).collect(),
                    p_indices: p,
                });
                r.order1 = Some(Order1Report {
                    verdict: if failing.is_empty() { PassFail::Pass } else { PassFail::Fail },
                    failing_eigenvalues: failing.iter().map(|l| ComplexValue::float(*l)).collect(),
                });
                r.order2 = Some(Order2Report {
                    verdict: if status == JordanStatus::Pass {
                        Order2Verdict::Incomplete
                    } else {
                        Order2Verdict::Skipped
                    },
                    violations: Vec::new(),
                });
                if status == JordanStatus::Pass {
                    r.warnings
                        .push("order-2 analysis incomplete (non-diagonalizable case)".into());
                }
                r.jordan = Some(JordanReport {
                    status,
                    blocks: clusters
                        .iter()
                        .map(|c| BlockReport {
                            eigenvalue: ComplexValue::float(c.eigenvalue),
                            sizes: c.sizes.clone(),
                        })
                        .collect(),
                    note: Some(JORDAN_NOTE.into()),
                });
            }
            Err(JordanError::Unresolvable { eigenvalue }) => {
                r.jordan = Some(JordanReport {
                    status: JordanStatus::Unresolvable,
                    blocks: Vec::new(),
                    note: Some(format!("rank decisions unstable at eigenvalue {eigenvalue}")),
                });
                r.order2 = Some(unavailable);
            }
            Err(JordanError::Eigen(e)) => {
                r.warnings.push(format!("Jordan structure: {e}"));
                r.order2 = Some(unavailable);
            }
        }
    }

    fn order2_reports(&self, r: &mut AnalysisReport, p: &[u32], parts: &Order2Parts) {
        let fast = fastpath_corollary(p);
        if fast.applied && !parts.violations.is_empty() {
            r.warnings.push(format!(
                "shortcut applies (B = {:?}) but the tensor check found {} violation(s)",
                fast.b_set,
                parts.violations.len()
            ));
        }
        r.fastpath = Some(fast);
        let verdict = if parts.violations.is_empty() {
            let class = galois_class(p, &parts.tensor);
            r.galois = Some(GaloisReport {
                class,
                pv_field: class.pv_field().to_string(),
            });
            Order2Verdict::Pass
        } else {
            Order2Verdict::Fail
        };
        r.order2 = Some(Order2Report {
            verdict,
            violations: violation_reports(&parts.violations),
        });
    }
}

fn diagonal_jordan() -> JordanReport {
    JordanReport {
        status: JordanStatus::Diagonalizable,
        blocks: Vec::new(),
        note: None,
    }
}

/// The exact basis starts with `c`, an eigenvector for 2.
fn check_homothetic(r: &mut AnalysisReport, es: &ExactSpectrum) {
    if es.p_indices.first() != Some(&2) {
        r.warnings.push("eigenvalue 2 missing at a normalized Darboux point".into());
    }
}

fn finish(r: &mut AnalysisReport) {
    let o1_fail = r.order1.as_ref().is_some_and(|o| o.verdict == PassFail::Fail);
    let jordan = r.jordan.as_ref().map(|j| j.status);
    let o2 = r.order2.as_ref().map(|o| o.verdict);
    let euler_ok = r.euler.as_ref().is_none_or(|e| e.consistent);
    if !euler_ok {
        r.warnings
            .push("derivatives violate the Euler relations at c; verdict withheld".into());
    }
    r.outcome = if r.error.is_some() {
        Outcome::InputError
    } else if o1_fail || jordan == Some(JordanStatus::Fail) || (o2 == Some(Order2Verdict::Fail) && euler_ok) {
        Outcome::Fail
    } else if o2 == Some(Order2Verdict::Pass) && euler_ok {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    };
    if r.outcome != Outcome::Pass {
        r.galois = r.galois.take().filter(|_| r.outcome == Outcome::Pass);
    }
}

/// Analyzes `potential` at every candidate (in parallel, output in input
/// order).
pub fn analyze(potential: &str, points: &[String], opts: &AnalysisOptions) -> Vec<AnalysisReport> {
    let analyzer = match Analyzer::new(potential) {
        Ok(a) => a,
        Err(e) => return vec![AnalysisReport::input_error(potential.trim(), None, format!("potential: {e}"))],
    };
    if points.is_empty() {
        let mut r = analyzer.blank("");
        r.input.darboux = None;
        r.error = Some("no Darboux candidate supplied".into());
        r.outcome = Outcome::InputError;
        return vec![r];
    }
    points.par_iter().map(|p| analyzer.analyze_point(p, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::verdict::GaloisClass;

    fn run(v: &str, c: &str) -> AnalysisReport {
        analyze(v, &[c.to_string()], &AnalysisOptions::default()).remove(0)
    }

    #[test]
    fn kepler_passes() {
        let r = run("-1/q1", "(-1)");
        assert_eq!(r.outcome, Outcome::Pass);
        assert_eq!(r.mode, Some(Mode::Exact));
        assert_eq!(r.galois.unwrap().class, GaloisClass::C);
        assert!(r.euler.unwrap().consistent);
    }

    #[test]
    fn cubic_term_fails() {
        let r = run("-1/q1 + q2^3/q1^4", "(-1, 0)");
        assert_eq!(r.outcome, Outcome::Fail);
        let o2 = r.order2.unwrap();
        assert_eq!(o2.violations.len(), 1);
        assert_eq!(o2.violations[0].p_triple, [1, 1, 1]);
        assert_eq!((o2.violations[0].i, o2.violations[0].j, o2.violations[0].k), (2, 2, 2));
        assert!((o2.violations[0].magnitude - 6.0).abs() < 1e-12);
        assert!(r.galois.is_none());
    }

    #[test]
    fn c2_class() {
        let r = run("-1/q1 + q2^2/(2*q1^3) + q2^3/q1^4", "(-1, 0)");
        assert_eq!(r.outcome, Outcome::Pass);
        assert_eq!(r.galois.unwrap().class, GaloisClass::C2);
        let r = run("-1/q1 + q2^2/(2*q1^3)", "(-1, 0)");
        assert_eq!(r.galois.unwrap().class, GaloisClass::C);
    }

    #[test]
    fn floating_matches_exact() {
        let opts = AnalysisOptions {
            force_floating: true,
            ..AnalysisOptions::default()
        };
        for (v, c, class) in [
            ("-1/q1 + q2^2/(2*q1^3) + q2^3/q1^4", "(-1, 0)", Some(GaloisClass::C2)),
            ("-1/q1 + q2^3/q1^4", "(-1, 0)", None),
        ] {
            let r = analyze(v, &[c.into()], &opts).remove(0);
            assert_eq!(r.mode, Some(Mode::Floating));
            assert_eq!(r.galois.map(|g| g.class), class);
        }
    }

    #[test]
    fn input_errors() {
        assert_eq!(run("1/q1^2", "(1)").outcome, Outcome::InputError);
        assert_eq!(run("1/(q1+q2)", "(1, 2)").outcome, Outcome::InputError);
        assert_eq!(run("-1/q1", "(1, 2").outcome, Outcome::InputError);
        let r = analyze("-1/q1", &[], &AnalysisOptions::default());
        assert_eq!(r[0].outcome, Outcome::InputError);
    }

    #[test]
    fn order1_failure() {
        // Hessian at (-1, 0) is diag(2, 1): eigenvalue 1 has no integer p
        let r = run("-1/q1 - q2^2/(2*q1^3)", "(-1, 0)");
        assert_eq!(r.outcome, Outcome::Fail);
        let o1 = r.order1.unwrap();
        assert_eq!(o1.verdict, PassFail::Fail);
        assert_eq!(o1.failing_eigenvalues.len(), 1);
        assert!((o1.failing_eigenvalues[0].to_complex().re - 1.0).abs() < 1e-12);
    }
}
