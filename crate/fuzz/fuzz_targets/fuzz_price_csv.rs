//! The date,close CSV parser must reject malformed input with errors, never
//! a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = momentscale::series::PriceSeries::from_csv_str("fuzz", text);
    }
});
