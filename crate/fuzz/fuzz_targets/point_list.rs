#![no_main]

use apstruct::cli::parse_point_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(coords) = parse_point_list(text) {
            assert!(coords.iter().all(|c| c.is_finite()));
        }
    }
});
