#![no_main]

use hfklift::model::parse_complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(qc) = parse_complex(text) else { return };
    // validation and the derived views must cope with arbitrary ids and gradings
    if qc.validate().is_empty() {
        let _ = qc.derived_stats();
        let _ = qc.mirror().canonical();
        let _ = qc.to_canonical_json();
    }
});
