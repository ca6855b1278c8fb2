#![no_main]

use libfuzzer_sys::fuzz_target;
use magneto::io::parse_vertex_function;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_vertex_function(text) {
        assert!(f.values().iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
});
