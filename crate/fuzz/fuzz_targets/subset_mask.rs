#![no_main]

use libfuzzer_sys::fuzz_target;
use magneto::io::{format_subset, parse_subset};

fuzz_target!(|input: (u8, &str)| {
    let n = input.0 as usize % 70;
    if let Ok(set) = parse_subset(input.1, n) {
        assert!(!set.is_empty());
        assert!(set.iter().all(|v| v < n));
        assert_eq!(parse_subset(&format_subset(set, n), n).unwrap(), set);
    }
});
