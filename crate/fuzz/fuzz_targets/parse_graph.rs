#![no_main]

use libfuzzer_sys::fuzz_target;
use stablecut::io::{parse_graph, write_graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(text) {
        let written = write_graph(&g);
        let again = parse_graph(&written).expect("written graph parses");
        assert_eq!(g.as_slice(), again.as_slice());
        assert_eq!(write_graph(&again), written);
    }
});
