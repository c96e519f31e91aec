#![no_main]

use behavior_coord::input::parse_trigger;
use libfuzzer_sys::fuzz_target;

const CATALOG: &str = include_str!("../../crates/core/data/mini.catalog.yaml");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let catalog = behavior_coord::parse_catalog(CATALOG).unwrap();
    let args: Vec<&str> = text.split_whitespace().collect();
    let _ = parse_trigger(&args, &catalog);
});
