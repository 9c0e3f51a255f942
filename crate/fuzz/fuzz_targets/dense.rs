#![no_main]

use libfuzzer_sys::fuzz_target;
use qldpc_core::formats::{read_dense, write_dense};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = read_dense(text) {
        assert_eq!(read_dense(&write_dense(&h)).unwrap(), h);
    }
});
