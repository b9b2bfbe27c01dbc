#![no_main]

use certcalc::scenario::{format_sig, CSV_DIGITS, JSON_DIGITS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: [u8; 8]| {
    let v = f64::from_le_bytes(data);
    if !v.is_finite() {
        return;
    }
    let s = format_sig(v, JSON_DIGITS);
    let back: f64 = s.parse().expect("formatted number parses");
    assert_eq!(back.to_bits(), v.to_bits(), "{s}");
    let short: f64 = format_sig(v, CSV_DIGITS).parse().expect("formatted number parses");
    assert!(v == 0.0 || ((short - v) / v).abs() <= 1e-11);
});
