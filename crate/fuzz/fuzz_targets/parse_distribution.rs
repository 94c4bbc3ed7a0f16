#![no_main]

use libfuzzer_sys::fuzz_target;
use stablecut::generators::WeightDistribution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = text.parse::<WeightDistribution>() {
        let again: WeightDistribution = d.to_string().parse().expect("displayed distribution parses");
        assert_eq!(d, again);
        assert!(d.mean() > 0.0 && d.variance() >= 0.0);
    }
});
