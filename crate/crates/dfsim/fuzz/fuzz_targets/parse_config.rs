#![no_main]

use dfsim::config::{ExperimentConfig, ExperimentKind};
use libfuzzer_sys::fuzz_target;

// Parsing and resolving a configuration must never panic, and anything that
// resolves must satisfy the resolved invariants (resolution re-validates).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::from_json(text) else {
        return;
    };
    for kind in [
        ExperimentKind::Fig1DeflectionSurface,
        ExperimentKind::Fig2Roc,
        ExperimentKind::Fig3Pd0VsSnr,
        ExperimentKind::Fig4Pd0VsK,
        ExperimentKind::Custom,
    ] {
        if let Ok(resolved) = cfg.resolve(kind) {
            assert!(!resolved.rules.is_empty());
            assert!(resolved.sensors >= 1);
            assert!(resolved.target_pf0 > 0.0 && resolved.target_pf0 <= 1.0);
        }
    }
});
