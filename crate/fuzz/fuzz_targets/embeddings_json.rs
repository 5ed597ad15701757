#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap::topology::EmbeddingSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = EmbeddingSet::from_json(text) {
        assert_eq!(EmbeddingSet::from_json(&set.to_json()).expect("export reparses"), set);
    }
});
