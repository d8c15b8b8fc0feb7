//! Contraction-factor laboratory.
//!
//! Exhaustive enumeration over all `n!` labellings of small digraphs (exact
//! rational expectations, type census, the type-1 ≤ type-0 lemma) and Monte
//! Carlo estimation of the single-round contraction factor on edge tables.
//!
//! A digraph vertex `v` picks the smallest-labelled member of its closed
//! out-neighbourhood `N⁺[v]`. Undirected graphs are the symmetric case.

use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{EngineError, RoundGraph};
use crate::field::{sample_key, FeistelPermutation};
use crate::graph::{EdgeTable, VertexId};

/// Largest `n` enumerated exhaustively (10! ≈ 3.6M labellings).
pub const MAX_EXHAUSTIVE_N: usize = 10;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("{n} vertices exceed the exhaustive limit of {MAX_EXHAUSTIVE_N}; use Monte Carlo estimation instead")]
    TooLarge { n: usize },
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("arc ({0}, {1}) is out of range")]
    InvalidArc(usize, usize),
    #[error("labelling is not a bijection onto 1..={0}")]
    NotBijective(usize),
    #[error("graph has no non-loop edges")]
    EmptyGraph,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<I>(n: usize, arcs: I) -> Result<Self, BoundsError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = vec![Vec::new(); n];
        for (a, b) in arcs {
            if a >= n || b >= n {
                return Err(BoundsError::InvalidArc(a, b));
            }
            if a != b {
                out[a].push(b);
            }
        }
        for o in &mut out {
            o.sort_unstable();
            o.dedup();
        }
        Ok(Digraph { n, out })
    }

    /// Symmetric digraph of an undirected edge table, with vertices
    /// renumbered densely in ascending ID order. Loop rows only add vertices.
    pub fn from_undirected(table: &EdgeTable) -> (Self, Vec<VertexId>) {
        let ids = table.vertices();
        let index = |v: VertexId| ids.binary_search(&v).expect("vertex of the table");
        let arcs: Vec<(usize, usize)> = table
            .rows()
            .iter()
            .flat_map(|e| [(index(e.v), index(e.w)), (index(e.w), index(e.v))])
            .collect();
        let g = Digraph::new(ids.len(), arcs).expect("indices are in range");
        (g, ids)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn out_neighbours(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, o)| o.iter().map(move |&b| (a, b)))
    }

    pub fn all_out_neighbourhoods_nonempty(&self) -> bool {
        self.out.iter().all(|o| !o.is_empty())
    }

    fn check_size(&self) -> Result<(), BoundsError> {
        if self.n > MAX_EXHAUSTIVE_N {
            Err(BoundsError::TooLarge { n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Bijective assignment of labels `1..=n` to vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelling(Vec<usize>);

impl Labelling {
    pub fn new(labels: Vec<usize>) -> Result<Self, BoundsError> {
        let n = labels.len();
        let mut seen = vec![false; n];
        for &l in &labels {
            if l == 0 || l > n || std::mem::replace(&mut seen[l - 1], true) {
                return Err(BoundsError::NotBijective(n));
            }
        }
        Ok(Labelling(labels))
    }

    pub fn label(&self, v: usize) -> usize {
        self.0[v]
    }
}

fn representative(g: &Digraph, labels: &[usize], v: usize) -> usize {
    g.out[v]
        .iter()
        .copied()
        .fold(v, |best, w| if labels[w] < labels[best] { w } else { best })
}

/// `r_L(v) = argmin_{w ∈ N⁺[v]} L(w)` for every vertex.
pub fn representatives_directed(g: &Digraph, l: &Labelling) -> Vec<usize> {
    (0..g.n).map(|v| representative(g, &l.0, v)).collect()
}

/// Exact counts accumulated over every labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    per_vertex: Vec<[u64; 3]>,
    representatives: u64,
    labellings: u64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            per_vertex: vec![[0; 3]; n],
            representatives: 0,
            labellings: 0,
        }
    }

    fn record(&mut self, g: &Digraph, labels: &[usize], chosen: &mut [u32]) {
        chosen.iter_mut().for_each(|c| *c = 0);
        for v in 0..g.n {
            chosen[representative(g, labels, v)] += 1;
        }
        for (v, &c) in chosen.iter().enumerate() {
            self.per_vertex[v][(c as usize).min(2)] += 1;
            self.representatives += u64::from(c > 0);
        }
        self.labellings += 1;
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.per_vertex.iter_mut().zip(other.per_vertex) {
            for t in 0..3 {
                a[t] += b[t];
            }
        }
        self.representatives += other.representatives;
        self.labellings += other.labellings;
        self
    }
}

/// Lexicographic successor; false once the slice is in descending order.
fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = (1..xs.len()).rev().find(|&i| xs[i - 1] < xs[i]) else {
        return false;
    };
    let j = (i..xs.len())
        .rev()
        .find(|&j| xs[j] > xs[i - 1])
        .expect("pivot exists");
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Visits all `n!` labellings, split by the labels of vertices 0 and 1 so the
/// work parallelises. Counts are integers, so the merge order is irrelevant.
fn tally_all(g: &Digraph) -> Result<Tally, BoundsError> {
    g.check_size()?;
    let n = g.n;
    if n < 2 {
        let mut t = Tally::new(n);
        let mut chosen = vec![0; n];
        t.record(g, &(1..=n).collect::<Vec<_>>(), &mut chosen);
        return Ok(t);
    }
    let prefixes: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (1..=n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let tally = prefixes
        .par_iter()
        .map(|&(a, b)| {
            let mut t = Tally::new(n);
            let mut chosen = vec![0; n];
            let mut rest: Vec<usize> = (1..=n).filter(|&x| x != a && x != b).collect();
            let mut labels = vec![0; n];
            labels[0] = a;
            labels[1] = b;
            loop {
                labels[2..].copy_from_slice(&rest);
                t.record(g, &labels, &mut chosen);
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            t
        })
        .reduce(|| Tally::new(n), Tally::merge);
    Ok(tally)
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `E|{r_L(v)}|` over a uniformly random labelling, exactly.
pub fn exact_expected_representatives(g: &Digraph) -> Result<BigRational, BoundsError> {
    let t = tally_all(g)?;
    Ok(ratio(t.representatives, t.labellings))
}

/// Per-vertex labelling counts by type, and the expected type totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCensus {
    /// `[type 0, type 1, type 2+]` labelling counts for each vertex.
    pub per_vertex: Vec<[u64; 3]>,
    pub labellings: u64,
    pub r0: BigRational,
    pub r1: BigRational,
    pub r2plus: BigRational,
}

impl TypeCensus {
    pub fn expected_representatives(&self) -> BigRational {
        &self.r1 + &self.r2plus
    }

    /// One row per vertex: `vertex, type0, type1, type2plus`.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "# vertex\ttype0\ttype1\ttype2plus")?;
        for (v, c) in self.per_vertex.iter().enumerate() {
            writeln!(sink, "{v}\t{}\t{}\t{}", c[0], c[1], c[2])?;
        }
        sink.flush()
    }
}

pub fn type_census(g: &Digraph) -> Result<TypeCensus, BoundsError> {
    let t = tally_all(g)?;
    let sum = |k: usize| t.per_vertex.iter().map(|c| c[k]).sum::<u64>();
    Ok(TypeCensus {
        r0: ratio(sum(0), t.labellings),
        r1: ratio(sum(1), t.labellings),
        r2plus: ratio(sum(2), t.labellings),
        per_vertex: t.per_vertex,
        labellings: t.labellings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaOutcome {
    Holds,
    Violated {
        vertex: usize,
        type1: u64,
        type0: u64,
    },
}

/// Checks, for every vertex with a non-empty out-neighbourhood, that it is
/// type 1 under no more labellings than it is type 0.
pub fn lemma1_check(g: &Digraph) -> Result<LemmaOutcome, BoundsError> {
    let census = type_census(g)?;
    for (v, c) in census.per_vertex.iter().enumerate() {
        if !g.out[v].is_empty() && c[1] > c[0] {
            return Ok(LemmaOutcome::Violated {
                vertex: v,
                type1: c[1],
                type0: c[0],
            });
        }
    }
    Ok(LemmaOutcome::Holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMethod {
    /// Uniform random labelling (Fisher–Yates shuffle of ranks).
    Full,
    Affine,
    Keyed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    /// Mean fraction of vertices chosen as representatives.
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub vertices: usize,
}

impl GammaEstimate {
    fn from_counts(sum: u128, sum_sq: u128, samples: u64, vertices: usize) -> Self {
        let s = samples as f64;
        let n = vertices as f64;
        let mean_count = sum as f64 / s;
        let var = if samples > 1 {
            ((sum_sq as f64 - s * mean_count * mean_count) / (s - 1.0)).max(0.0)
        } else {
            0.0
        };
        GammaEstimate {
            mean: mean_count / n,
            std_error: (var / s).sqrt() / n,
            samples,
            vertices,
        }
    }

    /// One summary row: `mean, std_error, samples, vertices`.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(sink, "# mean\tstd_error\tsamples\tvertices")?;
        writeln!(
            sink,
            "{:.6}\t{:.6}\t{}\t{}",
            self.mean, self.std_error, self.samples, self.vertices
        )?;
        sink.flush()
    }
}

fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x6761_6d6d_6100_0000);
    r.set_stream(sample);
    r
}

/// Closed neighbourhoods in compressed form over dense indices `0..n`.
struct Adjacency {
    ids: Vec<VertexId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// `edges` must be symmetric, loop-free and sorted by source.
    fn from_round_graph(graph: &RoundGraph) -> Self {
        let ids = graph.vertices();
        let index = |v: VertexId| ids.binary_search(&v).expect("vertex of the graph") as u32;
        let mut offsets = Vec::with_capacity(ids.len() + 1);
        let mut targets = Vec::with_capacity(graph.len());
        offsets.push(0);
        let mut current = ids.first().copied();
        for e in graph.edges() {
            if Some(e.v) != current {
                offsets.push(targets.len());
                current = Some(e.v);
            }
            targets.push(index(e.w));
        }
        offsets.push(targets.len());
        Adjacency {
            ids,
            offsets,
            targets,
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    /// Distinct representatives when vertex `i` has order key `keys[i]`.
    fn count_representatives(&self, keys: &[u64], hit: &mut [bool]) -> u64 {
        hit.iter_mut().for_each(|h| *h = false);
        let mut count = 0;
        for v in 0..self.len() {
            let mut best = v;
            for &w in &self.targets[self.offsets[v]..self.offsets[v + 1]] {
                if keys[w as usize] < keys[best] {
                    best = w as usize;
                }
            }
            if !std::mem::replace(&mut hit[best], true) {
                count += 1;
            }
        }
        count
    }
}

/// Mean over `samples` independent single rounds of the engine's
/// representative rule of `distinct representatives / |V|`. Loop rows are
/// dropped first, so `|V|` counts non-isolated vertices only.
pub fn monte_carlo_gamma(
    table: &EdgeTable,
    method: GammaMethod,
    samples: u64,
    seed: u64,
) -> Result<GammaEstimate, BoundsError> {
    if samples == 0 {
        return Err(BoundsError::ZeroSamples);
    }
    let proper: EdgeTable = table
        .rows()
        .iter()
        .filter(|e| !e.is_loop())
        .copied()
        .collect();
    let adj = Adjacency::from_round_graph(&RoundGraph::initial(&proper));
    let n = adj.len();
    if n == 0 {
        return Err(BoundsError::EmptyGraph);
    }
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map_init(
            || (vec![0u64; n], vec![false; n]),
            |(keys, hit), s| {
                match method {
                    GammaMethod::Full => {
                        keys.iter_mut().zip(0..).for_each(|(k, rank)| *k = rank);
                        keys.shuffle(&mut sample_rng(seed, s));
                    }
                    GammaMethod::Affine => {
                        let key = sample_key(seed, s);
                        for (k, &v) in keys.iter_mut().zip(&adj.ids) {
                            *k = key.apply(v);
                        }
                    }
                    GammaMethod::Keyed => {
                        let perm = FeistelPermutation::for_round(seed, s);
                        for (k, &v) in keys.iter_mut().zip(&adj.ids) {
                            *k = perm.permute(v);
                        }
                    }
                }
                let c = u128::from(adj.count_representatives(keys, hit));
                (c, c * c)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(GammaEstimate::from_counts(sum, sum_sq, samples, n))
}

/// Monte Carlo counterpart of [`exact_expected_representatives`] under
/// full randomisation, reported as a fraction of `n`.
pub fn monte_carlo_gamma_directed(
    g: &Digraph,
    samples: u64,
    seed: u64,
) -> Result<GammaEstimate, BoundsError> {
    if samples == 0 {
        return Err(BoundsError::ZeroSamples);
    }
    if g.n == 0 {
        return Err(BoundsError::EmptyGraph);
    }
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut labels: Vec<usize> = (1..=g.n).collect();
            labels.shuffle(&mut sample_rng(seed, s));
            let mut hit = vec![false; g.n];
            for v in 0..g.n {
                hit[representative(g, &labels, v)] = true;
            }
            let c = hit.iter().filter(|&&h| h).count() as u128;
            (c, c * c)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(GammaEstimate::from_counts(sum, sum_sq, samples, g.n))
}
