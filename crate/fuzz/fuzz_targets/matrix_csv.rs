#![no_main]
use libfuzzer_sys::fuzz_target;

use oglp::io::{format_matrix, parse_matrix};

fuzz_target!(|data: &str| {
    if let Ok(m) = parse_matrix(data) {
        assert_eq!(
            parse_matrix(&format_matrix(&m)).expect("formatted matrix parses"),
            m
        );
    }
});
