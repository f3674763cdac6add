#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = csgbvi::parse_csg(text) {
        // Serialization must round-trip and normalization must not panic.
        let again = csgbvi::parse_csg(&csgbvi::model::to_json(&g).to_string()).expect("round trip");
        assert_eq!(again.names(), g.names());
        let _ = csgbvi::normalize(&g);
    }
});
