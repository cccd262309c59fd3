#![no_main]

use bellinfo::qstate::{parse_state_file_with_cap, to_state_json};
use libfuzzer_sys::fuzz_target;

// A small cap keeps presets and matrices cheap to build.
const CAP: usize = 5;

fuzz_target!(|data: &[u8]| {
    let Ok(rho) = parse_state_file_with_cap(data, CAP) else {
        return;
    };
    assert!(rho.validate().is_empty());
    let again = parse_state_file_with_cap(to_state_json(&rho).as_bytes(), CAP).expect("serialized state parses");
    assert_eq!(rho.entries(), again.entries());
});
