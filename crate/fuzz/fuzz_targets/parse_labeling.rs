#![no_main]

use libfuzzer_sys::fuzz_target;
use randcc::graph::{canonicalize, parse_labeling, partitions_equal, write_labeling};

fuzz_target!(|data: &[u8]| {
    let Ok(labeling) = parse_labeling(data) else {
        return;
    };
    let mut text = Vec::new();
    write_labeling(&labeling, &mut text).unwrap();
    assert_eq!(parse_labeling(&text[..]).unwrap(), labeling);
    let canonical = canonicalize(&labeling);
    assert!(partitions_equal(&labeling, &canonical).unwrap());
    assert_eq!(canonicalize(&canonical), canonical);
});
