#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap_cli::config::{parse_config, to_toml};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_config(text) {
        let _ = parse_config(&to_toml(&c));
    }
});
