#![no_main]

use hfklift::model::parse_bundle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for qc in parse_bundle(text).into_iter().flatten() {
        let _ = qc.validate();
    }
});
