#![no_main]

use hfklift::model::{decode_text, parse_bundle};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = decode_text(data, true) {
        let _ = parse_bundle(&text);
    }
});
