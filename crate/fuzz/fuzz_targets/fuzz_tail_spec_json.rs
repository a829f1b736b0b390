//! Tail-spec JSON through normalization and the closed-form evaluators:
//! errors are expected on bad specs, panics are not.

#![no_main]

use libfuzzer_sys::fuzz_target;
use momentscale::tail::TailSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = serde_json::from_str::<TailSpec>(text) {
            let _ = spec.predicted_exponents();
            if let Ok(model) = spec.normalize() {
                let _ = model.tail_prob(spec.x1);
                let _ = model.truncated_moment(spec.x1 * 2.0, 4);
                if let Ok(cut) = model.solve_cutoff(252) {
                    let _ = model.truncated_moment(cut.x_w, 6);
                }
            }
        }
    }
});
