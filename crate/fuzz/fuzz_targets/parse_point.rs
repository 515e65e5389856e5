#![no_main]

use darboux_core::analysis::darboux::Point;
use darboux_core::analysis::parse::parse_point;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = parse_point(text) {
        let p = Point::from_components(&c);
        assert_eq!(p.len(), c.len());
        assert_eq!(p.to_complex().len(), c.len());
    }
});
