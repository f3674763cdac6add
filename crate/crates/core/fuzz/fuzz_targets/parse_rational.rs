#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = csgbvi::parse_rational(text) {
        let printed = csgbvi::rational::to_fraction(&r);
        assert_eq!(csgbvi::parse_rational(&printed).unwrap(), r);
    }
});
