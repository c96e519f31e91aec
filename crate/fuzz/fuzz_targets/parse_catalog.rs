#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(catalog) = behavior_coord::parse_catalog(text) {
        // anything that loads must survive a round trip
        let yaml = catalog.to_yaml().expect("serializes");
        let again = behavior_coord::parse_catalog(&yaml).expect("reparses");
        assert_eq!(again, catalog);
    }
});
