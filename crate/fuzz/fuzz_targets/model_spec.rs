#![no_main]
use hyperconv_core::SturmLiouvilleModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(m) = SturmLiouvilleModel::from_spec_str(src) {
            for x in [1e-4, 0.5, 3.0] {
                let _ = m.log_deriv(x);
            }
        }
    }
});
