#![no_main]

use libfuzzer_sys::fuzz_target;
use magneto::io::{graph_to_json, parse_graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(text) {
        // anything accepted must survive a write/read cycle
        let back = parse_graph(&graph_to_json(&g)).expect("serialized graph parses");
        assert_eq!(back.n(), g.n());
        assert_eq!(back.edges().len(), g.edges().len());
    }
});
