#![no_main]

//! Input: 8 bytes of seed, one method byte, then (v, w) pairs of u16s.

use libfuzzer_sys::fuzz_target;
use randcc::baselines::union_find_components;
use randcc::graph::canonicalize;
use randcc::{run, EdgeTable, EngineConfig, OrderingFamily, Variant};

fuzz_target!(|data: &[u8]| {
    if data.len() < 9 {
        return;
    }
    let seed = u64::from_le_bytes(data[..8].try_into().unwrap());
    let (method, variant) = match data[8] % 6 {
        0 => (OrderingFamily::MinId, Variant::Lean),
        1 => (OrderingFamily::MinId, Variant::Fast),
        2 => (OrderingFamily::RandomKeys, Variant::Lean),
        3 => (OrderingFamily::Affine, Variant::Lean),
        4 => (OrderingFamily::Affine, Variant::Fast),
        _ => (OrderingFamily::KeyedPermutation, Variant::Lean),
    };
    let pairs = data[9..].chunks_exact(4).map(|c| {
        (
            u64::from(u16::from_le_bytes([c[0], c[1]])),
            u64::from(u16::from_le_bytes([c[2], c[3]])),
        )
    });
    let table = EdgeTable::from_pairs(pairs);
    let (labels, _) = run(&table, &EngineConfig::new(method, variant, seed)).unwrap();
    assert_eq!(canonicalize(&labels), union_find_components(&table));
});
