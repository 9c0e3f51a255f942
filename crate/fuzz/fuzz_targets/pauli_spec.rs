#![no_main]

use libfuzzer_sys::fuzz_target;
use qldpc_core::pauli::PauliSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<PauliSpec>() {
        if let Ok(p) = spec.to_vector(64) {
            assert_eq!(p.to_string().parse::<PauliSpec>().unwrap().to_vector(64).unwrap(), p);
        }
    }
});
