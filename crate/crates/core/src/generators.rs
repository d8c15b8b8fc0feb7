//! Seeded graph families: paths, path unions, R-MAT, grids, G(n, m), the
//! high-gamma pendant cycle and directed cycles.
//!
//! Every generator is a pure function of its parameters. Vertices that end up
//! without an edge are emitted as loop rows so they still exist in the table.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::Digraph;
use crate::graph::{Edge, EdgeTable, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParameter(msg.into())
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Vertex numbering along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathNumbering {
    /// `1, 2, …, n` in path order; the MinId worst case.
    Sequential,
    /// Consecutive triples numbered side, centre, side with the centre
    /// smallest, so one MinId round contracts each triple to its centre.
    Optimal,
    /// A seeded uniform relabelling of `1..=n`.
    Shuffled(u64),
}

/// Labels along the path, in path order.
pub fn path_order(n: u64, numbering: PathNumbering) -> Vec<VertexId> {
    match numbering {
        PathNumbering::Sequential => (1..=n).collect(),
        PathNumbering::Optimal => {
            let triples = n / 3;
            let mut order = Vec::with_capacity(n as usize);
            for t in 0..triples {
                order.extend([triples + 2 * t + 1, t + 1, triples + 2 * t + 2]);
            }
            order.extend(3 * triples + 1..=n);
            order
        }
        PathNumbering::Shuffled(seed) => {
            let mut order: Vec<VertexId> = (1..=n).collect();
            order.shuffle(&mut rng(seed, 0));
            order
        }
    }
}

pub fn gen_path(n: u64, numbering: PathNumbering) -> Result<EdgeTable, GenError> {
    if n == 0 {
        return Err(invalid("path needs at least one vertex"));
    }
    let order = path_order(n, numbering);
    if n == 1 {
        return Ok(EdgeTable::from_pairs([(order[0], order[0])]));
    }
    Ok(order.windows(2).map(|w| Edge::new(w[0], w[1])).collect())
}

/// Disjoint sequential paths with consecutive ID ranges.
pub fn gen_path_union(lengths: &[u64]) -> Result<EdgeTable, GenError> {
    if lengths.is_empty() {
        return Err(invalid("path union needs at least one path"));
    }
    let mut rows = Vec::new();
    let mut base = 0u64;
    for &len in lengths {
        if len == 0 {
            return Err(invalid("every path length must be at least 1"));
        }
        if len == 1 {
            rows.push(Edge::new(base + 1, base + 1));
        }
        rows.extend((1..len).map(|i| Edge::new(base + i, base + i + 1)));
        base += len;
    }
    Ok(EdgeTable::from_rows(rows))
}

/// The quadrant probabilities used for the RMAT benchmark graph.
pub const RMAT_DEFAULT: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

const RMAT_CHUNK: u64 = 4096;

/// Recursive-quadrant sampling over `2^scale` vertices (IDs `0..2^scale`).
/// Duplicate rows are kept; they disappear at symmetrisation.
pub fn gen_rmat(
    scale: u32,
    edge_count: u64,
    probs: [f64; 4],
    seed: u64,
    shuffle: bool,
) -> Result<EdgeTable, GenError> {
    if scale > 30 {
        return Err(invalid("R-MAT scale must be at most 30"));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(invalid("R-MAT probabilities must be non-negative"));
    }
    if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid("R-MAT probabilities must sum to 1"));
    }
    let (ab, abc) = (probs[0] + probs[1], probs[0] + probs[1] + probs[2]);
    let chunks = edge_count.div_ceil(RMAT_CHUNK);
    let rows: Vec<Edge> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut r = rng(seed, c);
            let count = RMAT_CHUNK.min(edge_count - c * RMAT_CHUNK);
            (0..count)
                .map(|_| {
                    let (mut u, mut v) = (0u64, 0u64);
                    for level in (0..scale).rev() {
                        let x: f64 = r.gen();
                        let bit = 1u64 << level;
                        if x < probs[0] {
                        } else if x < ab {
                            v |= bit;
                        } else if x < abc {
                            u |= bit;
                        } else {
                            u |= bit;
                            v |= bit;
                        }
                    }
                    Edge::new(u, v)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let table = EdgeTable::from_rows(rows);
    Ok(if shuffle {
        shuffle_ids(&table, seed)
    } else {
        table
    })
}

/// 4-neighbour pixel grid; every candidate edge survives with
/// `keep_probability`. IDs are shuffled so they carry no geometry.
pub fn gen_grid(
    width: u64,
    height: u64,
    keep_probability: f64,
    seed: u64,
) -> Result<EdgeTable, GenError> {
    if width == 0 || height == 0 {
        return Err(invalid("grid dimensions must be at least 1"));
    }
    if !(0.0..=1.0).contains(&keep_probability) {
        return Err(invalid("keep probability must lie in [0, 1]"));
    }
    let n = width * height;
    let mut ids: Vec<VertexId> = (1..=n).collect();
    ids.shuffle(&mut rng(seed, 1));
    let mut r = rng(seed, 0);
    let mut touched = vec![false; n as usize];
    let mut rows = Vec::new();
    let mut keep = |a: u64, b: u64, rows: &mut Vec<Edge>| {
        if r.gen_bool(keep_probability) {
            touched[a as usize] = true;
            touched[b as usize] = true;
            rows.push(Edge::new(ids[a as usize], ids[b as usize]));
        }
    };
    for y in 0..height {
        for x in 0..width {
            let p = y * width + x;
            if x + 1 < width {
                keep(p, p + 1, &mut rows);
            }
            if y + 1 < height {
                keep(p, p + width, &mut rows);
            }
        }
    }
    for (p, t) in touched.iter().enumerate() {
        if !t {
            rows.push(Edge::new(ids[p], ids[p]));
        }
    }
    Ok(EdgeTable::from_rows(rows))
}

/// `edge_count` uniformly drawn non-loop pairs over `1..=n`; vertices left
/// without an edge get a loop row. Test fodder only.
pub fn gen_erdos_renyi(n: u64, edge_count: u64, seed: u64) -> Result<EdgeTable, GenError> {
    if n == 0 {
        return Err(invalid("G(n, m) needs at least one vertex"));
    }
    if n == 1 && edge_count > 0 {
        return Err(invalid("a single vertex admits no edges"));
    }
    let mut r = rng(seed, 0);
    let mut touched = vec![false; n as usize + 1];
    let mut rows = Vec::with_capacity(edge_count as usize);
    for _ in 0..edge_count {
        let u = r.gen_range(1..=n);
        let mut v = r.gen_range(1..n);
        if v >= u {
            v += 1;
        }
        touched[u as usize] = true;
        touched[v as usize] = true;
        rows.push(Edge::new(u, v));
    }
    rows.extend(
        (1..=n)
            .filter(|&v| !touched[v as usize])
            .map(|v| Edge::new(v, v)),
    );
    Ok(EdgeTable::from_rows(rows))
}

/// A 5-cycle (vertices 1..=5) where every cycle vertex carries three pendant
/// leaves (6..=20): the undirected graph with the highest known contraction
/// factor under full randomisation.
pub fn gen_fig11() -> EdgeTable {
    let mut rows = Vec::with_capacity(20);
    for i in 0..5u64 {
        let c = i + 1;
        rows.push(Edge::new(c, (i + 1) % 5 + 1));
        for j in 0..3 {
            rows.push(Edge::new(c, 6 + 3 * i + j));
        }
    }
    EdgeTable::from_rows(rows)
}

/// Arcs `i -> i+1 mod n`.
pub fn gen_directed_cycle(n: usize) -> Result<Digraph, GenError> {
    if n < 2 {
        return Err(invalid("directed cycle needs at least two vertices"));
    }
    Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).map_err(|e| invalid(e.to_string()))
}

/// Random digraph on `n` vertices where each possible arc is present with
/// probability `arc_probability`, then every vertex without an out-arc gets one
/// uniformly chosen arc.
pub fn gen_random_digraph(n: usize, arc_probability: f64, seed: u64) -> Result<Digraph, GenError> {
    if n < 2 {
        return Err(invalid("random digraph needs at least two vertices"));
    }
    if !(0.0..=1.0).contains(&arc_probability) {
        return Err(invalid("arc probability must lie in [0, 1]"));
    }
    let mut r = rng(seed, 0);
    let mut arcs = Vec::new();
    for v in 0..n {
        let before = arcs.len();
        for u in 0..n {
            if u != v && r.gen_bool(arc_probability) {
                arcs.push((v, u));
            }
        }
        if arcs.len() == before {
            let mut u = r.gen_range(0..n - 1);
            if u >= v {
                u += 1;
            }
            arcs.push((v, u));
        }
    }
    Digraph::new(n, arcs).map_err(|e| invalid(e.to_string()))
}

/// Applies a seeded permutation of the occurring IDs. Also returns the map
/// `old -> new`.
pub fn shuffle_ids_with_map(
    table: &EdgeTable,
    seed: u64,
) -> (EdgeTable, HashMap<VertexId, VertexId>) {
    let old = table.vertices();
    let mut new = old.clone();
    new.shuffle(&mut rng(seed, 0x5_4a55));
    let map: HashMap<VertexId, VertexId> = old.into_iter().zip(new).collect();
    let rows = table
        .rows()
        .iter()
        .map(|e| Edge::new(map[&e.v], map[&e.w]))
        .collect();
    (EdgeTable::from_rows(rows), map)
}

pub fn shuffle_ids(table: &EdgeTable, seed: u64) -> EdgeTable {
    shuffle_ids_with_map(table, seed).0
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Path {
        n: u64,
        numbering: PathNumbering,
    },
    PathUnion {
        lengths: Vec<u64>,
    },
    Rmat {
        scale: u32,
        edges: u64,
        probs: [f64; 4],
    },
    Grid {
        width: u64,
        height: u64,
        keep_probability: f64,
    },
    ErdosRenyi {
        n: u64,
        edges: u64,
    },
    DirectedCycle {
        n: usize,
    },
    Fig11,
}

/// A family plus seed; `shuffle_ids` relabels the result afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    pub shuffle_ids: bool,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec {
            family,
            seed,
            shuffle_ids: false,
        }
    }

    pub fn shuffled(mut self) -> Self {
        self.shuffle_ids = true;
        self
    }

    /// Directed cycles come back as their arc list.
    pub fn build(&self) -> Result<EdgeTable, GenError> {
        let table = match &self.family {
            Family::Path { n, numbering } => gen_path(*n, *numbering)?,
            Family::PathUnion { lengths } => gen_path_union(lengths)?,
            Family::Rmat {
                scale,
                edges,
                probs,
            } => gen_rmat(*scale, *edges, *probs, self.seed, false)?,
            Family::Grid {
                width,
                height,
                keep_probability,
            } => gen_grid(*width, *height, *keep_probability, self.seed)?,
            Family::ErdosRenyi { n, edges } => gen_erdos_renyi(*n, *edges, self.seed)?,
            Family::DirectedCycle { n } => EdgeTable::from_pairs(
                gen_directed_cycle(*n)?
                    .arcs()
                    .map(|(a, b)| (a as u64, b as u64)),
            ),
            Family::Fig11 => gen_fig11(),
        };
        Ok(if self.shuffle_ids {
            shuffle_ids(&table, self.seed)
        } else {
            table
        })
    }
}
