#![no_main]

use apstruct::config::SuiteConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = SuiteConfig::parse(text) {
            for case in &config.cases {
                assert_eq!(case.nu.len(), case.p);
                assert_eq!(case.eps.len(), case.q);
            }
            assert!(config.n_points >= 1 && config.n_tangents >= 1);
        }
    }
});
