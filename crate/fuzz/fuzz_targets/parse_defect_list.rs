#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap::topology::parse_defect_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_defect_list(text);
});
