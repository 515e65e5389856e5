//! Self-verification suites over the basis, the residue engine and table A.

use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basis::{epsilon_closed_form, ode_residual, BasisFamily};
use crate::exact::{rat, rational_to_string, Rational};
use crate::residue::{jordan_closed_form, s_one_one_even_closed_form, ResidueEngine};
use crate::table::{a_crosscheck_with, a_entry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfcheckConfig {
    /// Largest index for the residue-based suites.
    pub range: u32,
    /// Largest index for the ODE suite.
    pub ode_max: u32,
    /// Largest index for the closed-form epsilon suite.
    pub epsilon_max: u32,
    /// Adds 1 to `P_index` before anything runs.
    pub perturb_p: Option<u32>,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        SelfcheckConfig {
            range: 12,
            ode_max: 30,
            epsilon_max: 15,
            perturb_p: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub suites: Vec<SuiteResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn first_failure(&self) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| !s.passed)
    }
}

const MAX_LISTED: usize = 20;

struct Suite {
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
    start: Instant,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            checked: 0,
            failures: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < MAX_LISTED {
            self.failures.push(what());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            passed: self.failures.is_empty(),
            checked: self.checked,
            failures: self.failures,
            elapsed_ms: Some(self.start.elapsed().as_millis() as u64),
        }
    }
}

/// Runs every suite in a fixed order: ode, epsilon, recurrence, crosscheck,
/// constant-term, alpha-cubed, anchors.
pub fn run_selfcheck(config: &SelfcheckConfig) -> SelfcheckReport {
    let family_max = config.ode_max.max(config.epsilon_max).max(config.range + 1);
    let family = match config.perturb_p {
        Some(idx) => BasisFamily::with_perturbed_p(family_max, idx),
        None => BasisFamily::new(family_max),
    };
    let range = config.range;
    let mut suites = Vec::new();

    let mut s = Suite::new("ode");
    for i in 0..=config.ode_max {
        let pair = family.get(i);
        s.check(ode_residual(i, &pair.p_arc()).is_zero(), || format!("P_{i} violates the ODE"));
        s.check(ode_residual(i, &pair.q_arc()).is_zero(), || format!("Q_{i} violates the ODE"));
    }
    suites.push(s.finish());

    let mut s = Suite::new("epsilon");
    for i in 1..=config.epsilon_max {
        let e = &family.get(i).epsilon;
        let expected = epsilon_closed_form(i);
        s.check(!e.is_zero() && *e == expected, || {
            format!("eps_{i} = {}, expected {}", rational_to_string(e), rational_to_string(&expected))
        });
    }
    suites.push(s.finish());

    let engine = ResidueEngine::with_family(family);
    let table = engine.table(range);

    let mut s = Suite::new("recurrence");
    match &table {
        Ok(table) => {
            for i in 3..=range {
                for j in 2..=range {
                    for k in 2..=range {
                        let r = table.recurrence_residual(i, j, k);
                        let ok = matches!(&r, Ok(v) if v.iter().all(Zero::is_zero));
                        s.check(ok, || format!("({i},{j},{k}): {r:?}"));
                    }
                }
            }
        }
        Err(e) => s.check(false, || e.to_string()),
    }
    suites.push(s.finish());

    let mut s = Suite::new("crosscheck");
    match a_crosscheck_with(&engine, range, a_entry) {
        Ok(report) => {
            s.checked = report.checked;
            for m in report.mismatches.iter().take(MAX_LISTED) {
                s.failures.push(format!(
                    "{:?}: closed form {}, oracle {}",
                    m.triple, m.closed_form, m.oracle
                ));
            }
        }
        Err(e) => s.check(false, || e.to_string()),
    }
    suites.push(s.finish());

    let mut s = Suite::new("constant-term");
    let mut s3 = Suite::new("alpha-cubed");
    if let Ok(table) = &table {
        for (t, p) in table.iter() {
            s.check(p.c(0).is_zero(), || format!("{t:?}: c0 = {}", rational_to_string(p.c(0))));
            s3.check(p.c(3).is_zero(), || format!("{t:?}: c3 = {}", rational_to_string(p.c(3))));
        }
    }
    for i in 0..=range {
        for j in i..=range {
            if let Ok(res) = engine.s_poly(0, i, j) {
                for p in res.polys() {
                    s3.check(p.c(3).is_zero(), || format!("(0,{i},{j}): c3 nonzero"));
                }
            }
        }
    }
    suites.push(s.finish());
    suites.push(s3.finish());

    let mut s = Suite::new("anchors");
    let expect = |s: &mut Suite, triple: [u32; 3], k: usize, value: Rational| {
        let got = engine.s_positive(triple[0], triple[1], triple[2]).map(|p| p.c(k).clone());
        s.check(got.as_ref() == Ok(&value), || format!("{triple:?} c{k}: {got:?}, expected {value}"));
    };
    if range >= 1 {
        expect(&mut s, [1, 1, 1], 2, rat(8, 5));
    }
    let mut k = 0;
    while 2 + 2 * k <= range.min(18) {
        expect(&mut s, [1, 1, 2 + 2 * k], 1, s_one_one_even_closed_form(k));
        k += 1;
    }
    match engine.s_jordan(0) {
        Ok(p) => s.check(p.c(1).is_zero(), || "Jordan alpha-coefficient nonzero at 0".into()),
        Err(e) => s.check(false, || e.to_string()),
    }
    for i in 1..=range {
        let got = engine.s_jordan(i).map(|p| p.c(1).clone());
        s.check(got == Ok(jordan_closed_form(i)), || format!("Jordan {i}: {got:?}"));
        let z0 = engine.s_zero_index(i, 0, 0);
        s.check(matches!(&z0, Ok(v) if !v.is_zero()), || format!("S1_({i},0) vanishes"));
        let z1 = engine.s_zero_index(i, 1, 1);
        s.check(matches!(&z1, Ok(v) if !v.is_zero()), || format!("S2_({i},1) vanishes"));
        let z0c = engine.s_zero_index(i, 0, 1);
        s.check(matches!(&z0c, Ok(v) if v.is_zero()), || format!("S2_({i},0) nonzero"));
        let z1c = engine.s_zero_index(i, 1, 0);
        s.check(matches!(&z1c, Ok(v) if v.is_zero()), || format!("S1_({i},1) nonzero"));
    }
    if range >= 1 {
        let d = engine.s_double_zero(1, 2);
        s.check(d == Ok(rat(-2, 3)), || format!("Res t^2 Q_1 = {d:?}"));
    }
    for i in 2..=range {
        for m in 0..=2 {
            let d = engine.s_double_zero(i, m);
            s.check(matches!(&d, Ok(v) if v.is_zero()), || format!("Res t^{m} Q_{i} = {d:?}"));
        }
    }
    suites.push(s.finish());

    SelfcheckReport { suites }
}
