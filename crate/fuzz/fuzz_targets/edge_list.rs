#![no_main]
use libfuzzer_sys::fuzz_target;

use oglp::io::{format_edge_list, parse_edge_list, EDGE_EPS};

fuzz_target!(|data: &str| {
    if let Ok(w) = parse_edge_list(data) {
        let again = parse_edge_list(&format_edge_list(&w)).expect("formatted edge list parses");
        assert_eq!(w.nodes(), again.nodes());
        for (a, b) in w.as_slice().iter().zip(again.as_slice()) {
            let expected = if *a > EDGE_EPS { *a } else { 0.0 };
            assert_eq!(expected, *b);
        }
    }
});
