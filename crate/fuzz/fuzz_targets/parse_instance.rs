#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap::instance::{parse_instance, to_instance_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_instance(text) {
        let again = parse_instance(&to_instance_string(&p)).expect("written instance reparses");
        assert_eq!(again, p);
    }
});
