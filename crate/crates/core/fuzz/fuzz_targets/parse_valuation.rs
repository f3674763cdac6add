#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;

const MODEL: &str = include_str!("../../fixtures/appendix_b.json");

fuzz_target!(|data: &[u8]| {
    static GAME: OnceLock<csgbvi::NormalizedCsg> = OnceLock::new();
    let g = GAME.get_or_init(|| csgbvi::normalize(&csgbvi::parse_csg(MODEL).unwrap()));
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = csgbvi::parse_valuation(g, text) {
        assert_eq!(v.len(), g.num_states());
    }
});
