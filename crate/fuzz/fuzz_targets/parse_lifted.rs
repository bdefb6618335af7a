#![no_main]

use hfklift::model::LiftedFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = LiftedFile::parse(text) else { return };
    if let Ok(fc) = file.full_complex() {
        let _ = fc.check();
    }
});
