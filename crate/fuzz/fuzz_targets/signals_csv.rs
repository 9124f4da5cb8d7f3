#![no_main]
use libfuzzer_sys::fuzz_target;

use oglp::io::{format_signals, parse_signals};

fuzz_target!(|data: &str| {
    if let Ok(signals) = parse_signals(data) {
        let text = format_signals(&signals).expect("rectangular stream formats");
        assert_eq!(
            parse_signals(&text).expect("formatted stream parses"),
            signals
        );
    }
});
