#![no_main]
use hyperconv_core::measure::GridMeasure;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(m) = GridMeasure::from_csv(src) {
            let back = GridMeasure::from_csv(&m.to_csv()).expect("round trip");
            assert_eq!(back.density().len(), m.density().len());
            let _ = m.mass();
        }
    }
});
