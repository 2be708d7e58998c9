#![no_main]

use apstruct::cli::parse_sign_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(signs) = parse_sign_list(text) {
            assert_eq!(signs.len(), text.split(',').count());
        }
    }
});
