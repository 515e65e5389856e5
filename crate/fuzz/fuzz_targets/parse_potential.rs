#![no_main]

use darboux_core::analysis::potential::{parse_potential, DerivativeSet};
use darboux_core::exact::int;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 256 {
        return;
    }
    if let Ok(v) = parse_potential(text) {
        assert!(v.dimension >= 1);
        if v.dimension <= 3 && v.expr.node_count() <= 64 {
            let dv = DerivativeSet::new(&v);
            let point: Vec<_> = (0..v.dimension).map(|i| int(i as i64 + 2)).collect();
            let _ = dv.at(&point);
        }
    }
});
