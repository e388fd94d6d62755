#![no_main]
use hyperconv_core::SturmLiouvilleModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = SturmLiouvilleModel::from_alias(src);
    }
});
