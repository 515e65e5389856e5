//! Analysis reports: schema, JSON Lines encoding and text rendering.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::verdict::{EulerCheck, Fastpath, GaloisClass, JordanStatus};
use crate::exact::{rational_from_str, rational_to_string, Rational};

/// A real number: exact `"num/den"` string or a double.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "NumberRepr")]
pub enum Number {
    Exact(String),
    Float(f64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberRepr {
    Text(String),
    Float(f64),
}

impl TryFrom<NumberRepr> for Number {
    type Error = String;

    fn try_from(r: NumberRepr) -> Result<Self, String> {
        match r {
            NumberRepr::Text(s) => match rational_from_str(&s) {
                Some(q) if rational_to_string(&q) == s => Ok(Number::Exact(s)),
                _ => Err(format!("not a reduced \"num/den\" rational: {s:?}")),
            },
            NumberRepr::Float(x) => Ok(Number::Float(x)),
        }
    }
}

impl Number {
    pub fn exact(q: &Rational) -> Self {
        Number::Exact(rational_to_string(q))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            Number::Exact(s) => rational_from_str(s).and_then(|q| q.to_f64()).unwrap_or(f64::NAN),
            Number::Float(x) => *x,
        }
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Number::Exact(s) => rational_from_str(s),
            Number::Float(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: Number,
    pub im: Number,
}

impl ComplexValue {
    pub fn exact(q: &Rational) -> Self {
        ComplexValue {
            re: Number::exact(q),
            im: Number::Exact("0/1".into()),
        }
    }

    pub fn float(z: Complex64) -> Self {
        ComplexValue {
            re: Number::Float(z.re),
            im: Number::Float(z.im),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Floating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassFail {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order2Verdict {
    Pass,
    Fail,
    /// Order 1 failed.
    Skipped,
    /// Non-diagonalizable Hessian admitted by the Jordan condition.
    Incomplete,
    /// The eigenbasis could not be built reliably.
    Unavailable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    InputError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub potential: String,
    pub darboux: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarbouxReport {
    pub supplied: Vec<ComplexValue>,
    pub multiplier: ComplexValue,
    /// The rescaled point with multiplier -1.
    pub normalized: Vec<ComplexValue>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<ComplexValue>,
    pub p_indices: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order1Report {
    pub verdict: PassFail,
    pub failing_eigenvalues: Vec<ComplexValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    /// One-based eigen-indices, `i <= j <= k`.
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub p_triple: [u32; 3],
    pub value: ComplexValue,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order2Report {
    pub verdict: Order2Verdict,
    pub violations: Vec<ViolationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaloisReport {
    pub class: GaloisClass,
    pub pv_field: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub eigenvalue: ComplexValue,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanReport {
    pub status: JordanStatus,
    pub blocks: Vec<BlockReport>,
    pub note: Option<String>,
}

/// Wall-clock milliseconds per stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub darboux_ms: f64,
    pub derivatives_ms: f64,
    pub spectrum_ms: f64,
    pub verdicts_ms: f64,
    pub total_ms: f64,
}

/// Result of analyzing one potential at one Darboux candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub dimension: Option<usize>,
    pub mode: Option<Mode>,
    pub darboux: Option<DarbouxReport>,
    pub spectrum: Option<SpectrumReport>,
    pub order1: Option<Order1Report>,
    pub order2: Option<Order2Report>,
    pub galois: Option<GaloisReport>,
    pub jordan: Option<JordanReport>,
    pub fastpath: Option<Fastpath>,
    pub euler: Option<EulerCheck>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AnalysisReport {
    pub fn input_error(potential: &str, darboux: Option<&str>, message: String) -> Self {
        AnalysisReport {
            input: InputEcho {
                potential: potential.to_string(),
                darboux: darboux.map(str::to_string),
            },
            dimension: None,
            mode: None,
            darboux: None,
            spectrum: None,
            order1: None,
            order2: None,
            galois: None,
            jordan: None,
            fastpath: None,
            euler: None,
            warnings: Vec::new(),
            error: Some(message),
            outcome: Outcome::InputError,
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports hold only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// One report per non-blank line.
pub fn parse_report_lines(text: &str) -> Result<Vec<AnalysisReport>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(AnalysisReport::from_json)
        .collect()
}

/// 0 all pass, 1 any input error, 2 any failure, 3 otherwise inconclusive.
pub fn exit_code(reports: &[AnalysisReport]) -> i32 {
    let any = |o: Outcome| reports.iter().any(|r| r.outcome == o);
    if reports.is_empty() || any(Outcome::InputError) {
        1
    } else if any(Outcome::Fail) {
        2
    } else if any(Outcome::Inconclusive) {
        3
    } else {
        0
    }
}

fn show_number(n: &Number) -> String {
    match n {
        Number::Exact(s) => match s.strip_suffix("/1") {
            Some(int) => int.to_string(),
            None => s.clone(),
        },
        Number::Float(x) => format!("{x:.12}").trim_end_matches('0').trim_end_matches('.').to_string(),
    }
}

pub fn show_complex(z: &ComplexValue) -> String {
    let im = z.im.to_f64();
    if im == 0.0 {
        return show_number(&z.re);
    }
    let re = show_number(&z.re);
    let (sign, mag) = if im < 0.0 {
        ("-", show_number(&Number::Float(-im)))
    } else {
        ("+", show_number(&z.im))
    };
    format!("{re}{sign}{mag}*i")
}

fn show_vec(v: &[ComplexValue]) -> String {
    format!("({})", v.iter().map(show_complex).collect::<Vec<_>>().join(", "))
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Human-readable multi-line rendering.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "potential: {}", r.input.potential);
    if let Some(d) = &r.input.darboux {
        let _ = writeln!(s, "darboux: {d}");
    }
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error: {e}");
    }
    if let (Some(n), Some(m)) = (r.dimension, r.mode) {
        let _ = writeln!(s, "dimension: {n}, mode: {}", label(&m));
    }
    if let Some(d) = &r.darboux {
        let _ = writeln!(
            s,
            "multiplier: {}, normalized point: {}",
            show_complex(&d.multiplier),
            show_vec(&d.normalized)
        );
    }
    if let Some(sp) = &r.spectrum {
        let ps: Vec<String> = sp
            .p_indices
            .iter()
            .map(|p| p.map_or_else(|| "-".to_string(), |p| p.to_string()))
            .collect();
        let _ = writeln!(s, "eigenvalues: {}", show_vec(&sp.eigenvalues));
        let _ = writeln!(s, "p-indices: ({})", ps.join(", "));
    }
    if let Some(o) = &r.order1 {
        let _ = write!(s, "order 1: {}", label(&o.verdict));
        if !o.failing_eigenvalues.is_empty() {
            let _ = write!(s, " (no integer p for {})", show_vec(&o.failing_eigenvalues));
        }
        s.push('\n');
    }
    if let Some(o) = &r.order2 {
        let _ = writeln!(s, "order 2: {}", label(&o.verdict));
        for v in &o.violations {
            let _ = writeln!(
                s,
                "  T[{},{},{}] = {} with p = ({}, {}, {}) and A = 0",
                v.i,
                v.j,
                v.k,
                show_complex(&v.value),
                v.p_triple[0],
                v.p_triple[1],
                v.p_triple[2]
            );
        }
    }
    if let Some(f) = &r.fastpath {
        let _ = writeln!(s, "shortcut: {}", if f.applied { "applies" } else { "does not apply" });
    }
    if let Some(g) = &r.galois {
        let _ = writeln!(s, "galois: {} over {}", g.class.as_str(), g.pv_field);
    }
    if let Some(j) = &r.jordan {
        let _ = write!(s, "jordan: {}", label(&j.status));
        for b in &j.blocks {
            let _ = write!(s, " [{}: {:?}]", show_complex(&b.eigenvalue), b.sizes);
        }
        s.push('\n');
        if let Some(n) = &j.note {
            let _ = writeln!(s, "  note: {n}");
        }
    }
    if let Some(e) = &r.euler {
        let _ = writeln!(
            s,
            "euler relations: {} (max defect {:e})",
            if e.consistent { "consistent" } else { "INCONSISTENT" },
            e.max_defect
        );
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "outcome: {}", label(&r.outcome));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn numbers_round_trip() {
        let z = ComplexValue::exact(&rat(-3, 4));
        let j = serde_json::to_string(&z).unwrap();
        assert_eq!(j, r#"{"re":"-3/4","im":"0/1"}"#);
        assert_eq!(serde_json::from_str::<ComplexValue>(&j).unwrap(), z);
        let f = ComplexValue::float(Complex64::new(0.1, -2.5e-300));
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<ComplexValue>(&j).unwrap(), f);
        assert!(serde_json::from_str::<Number>("\"2/4\"").is_err());
        assert!(serde_json::from_str::<Number>("\"x\"").is_err());
    }

    #[test]
    fn exit_codes() {
        let mut a = AnalysisReport::input_error("q", None, "bad".into());
        assert_eq!(exit_code(&[a.clone()]), 1);
        a.outcome = Outcome::Pass;
        let mut b = a.clone();
        assert_eq!(exit_code(&[a.clone()]), 0);
        b.outcome = Outcome::Inconclusive;
        assert_eq!(exit_code(&[a.clone(), b.clone()]), 3);
        b.outcome = Outcome::Fail;
        assert_eq!(exit_code(&[a, b]), 2);
        assert_eq!(exit_code(&[]), 1);
    }

    #[test]
    fn text_of_complex() {
        assert_eq!(show_complex(&ComplexValue::exact(&rat(6, 1))), "6");
        assert_eq!(show_complex(&ComplexValue::float(Complex64::new(1.5, -0.25))), "1.5-0.25*i");
    }
}
