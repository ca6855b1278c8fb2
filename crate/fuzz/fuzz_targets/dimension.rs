#![no_main]

use libfuzzer_sys::fuzz_target;
use magneto::Dimension;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = text.parse::<Dimension>() {
        assert!(d.value() > 1.0);
        assert_eq!(d.to_string().parse::<Dimension>().unwrap(), d);
    }
});
