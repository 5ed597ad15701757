#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap::schedule::parse_envelope_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(env) = parse_envelope_csv(text) {
        for i in 0..=8 {
            let (a, b) = env.eval(i as f64 / 8.0);
            assert!(a >= 0.0 && b >= 0.0);
        }
    }
});
