#![no_main]

use bellinfo::bellgen::{parse_settings_file, settings_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(settings) = parse_settings_file(data) else {
        return;
    };
    let again = parse_settings_file(settings_to_json(&settings).as_bytes()).expect("serialized settings parse");
    assert_eq!(settings.pairs(), again.pairs());
});
