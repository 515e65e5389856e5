#![no_main]

use darboux_core::analysis::report::{parse_report_lines, AnalysisReport};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(reports) = parse_report_lines(text) {
        for r in reports {
            let again = AnalysisReport::from_json(&r.to_json()).expect("re-encoded report decodes");
            assert_eq!(again, r);
        }
    }
});
