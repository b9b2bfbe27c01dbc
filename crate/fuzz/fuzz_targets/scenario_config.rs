#![no_main]

use certcalc::scenario::parse_scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = parse_scenario(text) {
        if let Ok(prior) = file.prior_choice() {
            let _ = prior.describe();
        }
        let _ = file.quadrature_spec();
    }
});
