#![no_main]
use hyperconv_core::expr::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(e) = Expr::parse(src) {
            for x in [0.0, 1e-3, 0.5, 1.0, 7.0, 400.0] {
                let _ = e.eval(x);
            }
        }
    }
});
