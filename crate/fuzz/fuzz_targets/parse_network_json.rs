#![no_main]

use libfuzzer_sys::fuzz_target;
use susmap::network::{export_network, parse_network_json, NetworkFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = parse_network_json(text) {
        let again = parse_network_json(&export_network(&net, NetworkFormat::Json)).expect("export reparses");
        assert_eq!(again, net);
    }
});
