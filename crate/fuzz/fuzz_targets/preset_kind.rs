#![no_main]

use bellinfo::qstate::PresetKind;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = text.parse::<PresetKind>() {
        assert_eq!(kind.name(), text);
    }
});
