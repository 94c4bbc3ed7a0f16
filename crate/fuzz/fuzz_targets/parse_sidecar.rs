#![no_main]

use libfuzzer_sys::fuzz_target;
use stablecut::io::InstanceSidecar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = InstanceSidecar::from_json(text) {
        let again = InstanceSidecar::from_json(&s.to_json()).expect("written sidecar parses");
        assert_eq!(s, again);
    }
});
