#![no_main]

use dfsim::DecisionVector;
use libfuzzer_sys::fuzz_target;

// The bit-string parser must never panic, and every accepted input must
// round-trip through display unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(y) = text.parse::<DecisionVector>() {
        assert!(!y.is_empty());
        assert!(y.bits().iter().all(|&b| b <= 1));
        assert!(y.ones() <= y.len());
        assert_eq!(y.to_string(), text);
    }
});
