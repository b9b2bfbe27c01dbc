#![no_main]

use certcalc::scenario::{parse_axis, parse_count, parse_count_axis, parse_future, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = parse_axis(s) {
            assert!(!v.is_empty());
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
        if let Ok(v) = parse_count_axis(s) {
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
        let _ = parse_count(s);
        let _ = parse_future(s);
        let _ = s.parse::<Format>();
    }
});
