#![no_main]

use apstruct::report::{parse_json, to_csv, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(report) = parse_json(text) {
            let _ = to_csv(&report);
            // a parsed report re-serializes to something that parses again
            let again = parse_json(&to_json(&report)).expect("re-emitted report parses");
            assert_eq!(again.cases.len(), report.cases.len());
        }
    }
});
