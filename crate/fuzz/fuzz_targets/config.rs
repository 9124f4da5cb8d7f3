#![no_main]
use libfuzzer_sys::fuzz_target;

use oglp::config::parse_config;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = parse_config(data) {
        let text = cfg.to_toml().expect("valid config serializes");
        let again = parse_config(&text).expect("serialized config parses");
        assert_eq!(cfg, again);
    }
});
