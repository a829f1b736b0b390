//! Header sniffing across both series schemas: any byte soup must come back
//! as Ok or a structured error.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = momentscale::series::sniff_input_series("fuzz", text);
    }
});
