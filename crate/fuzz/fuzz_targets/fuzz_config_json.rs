//! Run-config JSON: parsing, layering and validation must never panic, even
//! on adversarial numeric values.

#![no_main]

use libfuzzer_sys::fuzz_target;
use momentscale::config::{PartialConfig, RunConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(layer) = PartialConfig::from_json_str(text) {
            let cfg = RunConfig::defaults("fuzz").apply(&layer);
            let _ = cfg.validate();
            let _ = cfg.plan.window_lengths(4536);
            let _ = cfg.mixture.validate();
            let _ = cfg.garch.validate();
        }
    }
});
