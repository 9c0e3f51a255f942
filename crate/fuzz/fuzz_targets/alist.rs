#![no_main]

use libfuzzer_sys::fuzz_target;
use qldpc_core::formats::{read_alist, write_alist};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = read_alist(text) {
        assert_eq!(read_alist(&write_alist(&h)).unwrap(), h);
    }
});
