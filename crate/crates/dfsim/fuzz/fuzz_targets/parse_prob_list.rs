#![no_main]

use dfsim::config::{parse_prob_list, parse_prob_param};
use dfsim::ProbParam;
use libfuzzer_sys::fuzz_target;

// The probability-list grammar must never panic, and accepted values must
// all be probabilities.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_prob_list(text) {
        assert!(!values.is_empty());
        assert!(values
            .iter()
            .all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
        // The param form mirrors the list form: scalar iff one entry.
        match parse_prob_param(text).expect("list parsed, param must too") {
            ProbParam::Shared(p) => {
                assert_eq!(values.len(), 1);
                assert_eq!(p, values[0]);
            }
            ProbParam::PerSensor(list) => assert_eq!(list, values),
        }
    }
});
