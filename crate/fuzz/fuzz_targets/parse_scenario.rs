#![no_main]

use behavior_coord::sim::{parse_scenario_document, Scenario};
use libfuzzer_sys::fuzz_target;

const CATALOG: &str = include_str!("../../crates/core/data/target_following.catalog.yaml");

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let catalog = behavior_coord::parse_catalog(CATALOG).unwrap();
    if let Ok(doc) = parse_scenario_document(text) {
        let _ = Scenario::from_document(&doc, &catalog);
    }
});
