#![no_main]

use libfuzzer_sys::fuzz_target;
use qldpc_core::formats::SeedSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<SeedSpec>() {
        assert_eq!(spec.to_string().parse::<SeedSpec>().unwrap(), spec);
        // Only in-memory constructions; file specs would touch the disk.
        if matches!(spec, SeedSpec::Circulant { size, .. } if size <= 64) {
            let _ = spec.to_matrix();
        }
    }
});
