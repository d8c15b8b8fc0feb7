//! Shared graph zoo for the integration suites.

#![allow(dead_code)]

use randcc::generators::{Family, GeneratorSpec, PathNumbering, RMAT_DEFAULT};
use randcc::EdgeTable;

pub struct ZooGraph {
    pub name: String,
    pub table: EdgeTable,
}

fn build(name: String, family: Family, seed: u64, shuffle: bool) -> ZooGraph {
    let mut spec = GeneratorSpec::new(family, seed);
    if shuffle {
        spec = spec.shuffled();
    }
    let table = spec.build().unwrap_or_else(|e| panic!("{name}: {e}"));
    ZooGraph { name, table }
}

/// 100 graphs: R-MAT up to scale 14, grids up to 200x200, paths, path unions
/// and sparse Erdős–Rényi graphs. Most are small; a few sit at the size caps.
pub fn zoo() -> Vec<ZooGraph> {
    let mut z = Vec::with_capacity(100);
    let mut seed = 1000u64;
    let mut next_seed = || {
        seed += 1;
        seed
    };

    for i in 0..24u32 {
        let scale = if i == 23 { 14 } else { 5 + i % 8 };
        let edges = if i == 23 { 1 << 15 } else { 3u64 << scale };
        let s = next_seed();
        z.push(build(
            format!("rmat-s{scale}-e{edges}-{s}"),
            Family::Rmat {
                scale,
                edges,
                probs: RMAT_DEFAULT,
            },
            s,
            i % 2 == 1,
        ));
    }
    for i in 0..20u64 {
        let (w, h) = if i == 19 {
            (200, 200)
        } else {
            (8 + 3 * i, 5 + 2 * i)
        };
        let keep = [0.3, 0.45, 0.5, 0.55, 0.8][i as usize % 5];
        let s = next_seed();
        z.push(build(
            format!("grid-{w}x{h}-p{keep}-{s}"),
            Family::Grid {
                width: w,
                height: h,
                keep_probability: keep,
            },
            s,
            false,
        ));
    }
    for i in 0..20u64 {
        let n = [1, 2, 3, 6, 17, 64, 200, 513, 1000, 2048][i as usize % 10];
        let s = next_seed();
        let numbering = match i % 3 {
            0 => PathNumbering::Sequential,
            1 => PathNumbering::Optimal,
            _ => PathNumbering::Shuffled(s),
        };
        z.push(build(
            format!("path-{n}-{numbering:?}"),
            Family::Path { n, numbering },
            s,
            i >= 10,
        ));
    }
    for i in 0..16u64 {
        let lengths: Vec<u64> = (0..(2 + i % 7))
            .map(|j| 1 + (j * 37 + i * 11) % 150)
            .collect();
        let s = next_seed();
        z.push(build(
            format!("path-union-{}x-{s}", lengths.len()),
            Family::PathUnion { lengths },
            s,
            i % 2 == 0,
        ));
    }
    for i in 0..20u64 {
        let n = 50 + 97 * i;
        let edges = n * (2 + i % 5) / 4;
        let s = next_seed();
        z.push(build(
            format!("er-{n}-{edges}-{s}"),
            Family::ErdosRenyi { n, edges },
            s,
            false,
        ));
    }
    assert_eq!(z.len(), 100);
    z
}

pub const FIG1: [(u64, u64); 10] = [
    (1, 5),
    (1, 10),
    (2, 4),
    (2, 9),
    (3, 8),
    (3, 10),
    (4, 9),
    (5, 6),
    (5, 7),
    (6, 10),
];

pub fn fig1() -> EdgeTable {
    EdgeTable::from_pairs(FIG1)
}
