#![no_main]

use libfuzzer_sys::fuzz_target;
use randcc::parse_edge_list;

fuzz_target!(|data: &[u8]| {
    let Ok(table) = parse_edge_list(data) else {
        return;
    };
    let mut text = Vec::new();
    table.write_to(&mut text).unwrap();
    let again = parse_edge_list(&text[..]).expect("written edge lists parse");
    assert!(again.same_rows(&table));
    let sym = table.symmetrize();
    assert!(sym.is_symmetric());
    assert!(sym.symmetrize().same_rows(&sym));
});
