#![no_main]

use libfuzzer_sys::fuzz_target;
use qldpc_core::formats::{code_from_json, code_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = code_from_json(text) {
        assert_eq!(code_from_json(&code_to_json(&code).unwrap()).unwrap(), code);
    }
});
