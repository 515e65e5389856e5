#![no_main]

use darboux_core::analysis::input::parse_input_document;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_input_document(text) {
        assert!(doc.tolerance.is_none_or(|t| t.is_finite() && t > 0.0));
        assert!(doc.int_tolerance.is_none_or(|t| t.is_finite() && t > 0.0));
    }
});
