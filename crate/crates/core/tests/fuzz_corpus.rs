//! Replays the checked-in fuzz seeds through the same invariants the fuzz
//! targets assert.

use std::fs;
use std::path::PathBuf;

use darboux_core::analysis::darboux::Point;
use darboux_core::analysis::input::parse_input_document;
use darboux_core::analysis::parse::parse_point;
use darboux_core::analysis::potential::parse_potential;
use darboux_core::analysis::report::{parse_report_lines, AnalysisReport};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn potential_seeds() {
    let accepted = seeds("parse_potential").iter().filter(|(_, t)| parse_potential(t).is_ok()).count();
    assert!(accepted >= 3);
}

#[test]
fn point_seeds() {
    for (path, text) in seeds("parse_point") {
        if let Ok(c) = parse_point(&text) {
            let p = Point::from_components(&c);
            assert_eq!(p.len(), c.len(), "{}", path.display());
        }
    }
}

#[test]
fn input_document_seeds() {
    let parsed: Vec<bool> = seeds("parse_input_document").iter().map(|(_, t)| parse_input_document(t).is_ok()).collect();
    assert!(parsed.contains(&true) && parsed.contains(&false));
}

#[test]
fn report_seeds_round_trip() {
    for (path, text) in seeds("parse_report") {
        let reports = parse_report_lines(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        for r in reports {
            assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
        }
    }
}
