//! Randomised Contraction.
//!
//! Each round picks, for every live vertex, the smallest order key in its
//! closed neighbourhood, rewrites the edge table through that choice and
//! drops loop and duplicate rows. The run ends when the edge table is empty.
//!
//! Two ways of composing the per-round maps into the final labeling:
//!
//! * [`Variant::Lean`] keeps one full-size table `L` and folds every round's
//!   `R` into it straight away. Space is deterministic.
//! * [`Variant::Fast`] keeps every `R_i` and joins them back to front at the
//!   end, carrying the composed affine key of the later rounds so rows that
//!   dropped out early can be relabelled in one step.

use thiserror::Error;

use crate::field::{compose_keys, AffineKey, FieldError, OrderingFamily, VertexOrder};
use crate::graph::{Edge, EdgeTable, Labeling, VertexId};
use crate::table::{group_by_source, relabel_edges, source_vertices, KeyedTable};
use crate::trace::{ContractionTrace, RoundStats};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no termination within {limit} rounds")]
    MaxRoundsExceeded {
        limit: usize,
        trace: Box<ContractionTrace>,
    },
    #[error("the {variant} variant cannot compose `{method}` orderings")]
    UnsupportedMethod {
        method: &'static str,
        variant: &'static str,
    },
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("round {round}: vertex {vertex} has no representative")]
    MissingRepresentative { round: usize, vertex: VertexId },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Lean,
    Fast,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Lean => "lean",
            Variant::Fast => "fast",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub method: OrderingFamily,
    pub seed: u64,
    pub variant: Variant,
    /// `None` selects [`default_max_rounds`].
    pub max_rounds: Option<usize>,
}

impl EngineConfig {
    pub fn new(method: OrderingFamily, variant: Variant, seed: u64) -> Self {
        EngineConfig {
            method,
            seed,
            variant,
            max_rounds: None,
        }
    }

    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = Some(rounds);
        self
    }

    fn round_limit(&self, vertices: usize) -> Result<usize, EngineError> {
        match self.max_rounds {
            Some(0) => Err(EngineError::InvalidConfig(
                "max_rounds must be at least 1".into(),
            )),
            Some(n) => Ok(n),
            None => Ok(default_max_rounds(self.method, vertices)),
        }
    }
}

/// `64 + 3 * ceil(log2 |V|)`. MinId is deterministic and can legitimately
/// need `|V| - 1` rounds, so it is never capped below `|V|`.
pub fn default_max_rounds(method: OrderingFamily, vertices: usize) -> usize {
    let log = usize::BITS - vertices.saturating_sub(1).leading_zeros();
    let cap = 64 + 3 * log as usize;
    match method {
        OrderingFamily::MinId => cap.max(vertices),
        _ => cap,
    }
}

/// Symmetric edge table of one round, sorted and duplicate-free. Only the
/// round-0 graph may contain loop rows (isolated input vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundGraph {
    round: usize,
    edges: Vec<Edge>,
}

impl RoundGraph {
    pub fn initial(input: &EdgeTable) -> Self {
        RoundGraph {
            round: 0,
            edges: input.symmetrize().into_rows(),
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        source_vertices(&self.edges)
    }

    pub fn to_edge_table(&self) -> EdgeTable {
        EdgeTable::from_rows(self.edges.clone()).symmetrize()
    }
}

/// The round's `R` table: current vertex -> representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentativeTable {
    round: usize,
    table: KeyedTable,
}

impl RepresentativeTable {
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn get(&self, v: VertexId) -> Option<u64> {
        self.table.get(v)
    }

    pub fn entries(&self) -> &[(VertexId, u64)] {
        self.table.rows()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn distinct_representatives(&self) -> usize {
        self.table.distinct_values()
    }

    fn into_table(self) -> KeyedTable {
        self.table
    }
}

/// `select v, least(h(v), min(h(w))) as r from E group by v`.
///
/// Relabelling orders store the key itself; the others store the vertex
/// attaining it.
pub fn compute_representatives(
    g: &RoundGraph,
    order: &VertexOrder,
) -> Result<RepresentativeTable, EngineError> {
    let relabel = order.relabels();
    let table = group_by_source(&g.edges, |v, run| {
        let mut best_key = order.order_key(v)?;
        let mut best = v;
        for e in run {
            let k = order.order_key(e.w)?;
            if k < best_key {
                best_key = k;
                best = e.w;
            }
        }
        Ok::<_, FieldError>(if relabel { best_key } else { best })
    })?;
    Ok(RepresentativeTable {
        round: g.round + 1,
        table,
    })
}

/// Rewrites every row through `r`, dropping loops and duplicates. Returns the
/// next round's graph and its row count.
pub fn contract_edges(
    g: &RoundGraph,
    r: &RepresentativeTable,
) -> Result<(RoundGraph, usize), EngineError> {
    let edges = match relabel_edges(&g.edges, &r.table) {
        Some(edges) => edges,
        None => {
            let vertex = g
                .edges
                .iter()
                .flat_map(|e| [e.v, e.w])
                .find(|v| r.get(*v).is_none())
                .unwrap_or_default();
            return Err(EngineError::MissingRepresentative {
                round: r.round,
                vertex,
            });
        }
    };
    let rows = edges.len();
    Ok((
        RoundGraph {
            round: g.round + 1,
            edges,
        },
        rows,
    ))
}

/// Accumulated keys of the back-to-front fold. Entry `i` (0-based) is the key
/// in effect when `R_{i+1}` is merged with the already folded tail, i.e.
/// `h_k ∘ … ∘ h_{i+2}`. The last entry is the identity.
pub fn fold_accumulators(round_keys: &[AffineKey]) -> Vec<AffineKey> {
    let k = round_keys.len();
    let mut out = vec![AffineKey::IDENTITY; k];
    let mut acc = AffineKey::IDENTITY;
    for i in (0..k.saturating_sub(1)).rev() {
        acc = compose_keys(&acc, &round_keys[i + 1]);
        out[i] = acc;
    }
    out
}

struct Round {
    order: VertexOrder,
    reps: RepresentativeTable,
}

/// Shared first phase: contract until the edge table is empty, handing each
/// round's representatives to `sink`.
fn contract_all<F>(
    input: &EdgeTable,
    cfg: &EngineConfig,
    trace: &mut ContractionTrace,
    mut sink: F,
) -> Result<(), EngineError>
where
    F: FnMut(Round, &mut ContractionTrace) -> usize,
{
    let mut graph = RoundGraph::initial(input);
    trace.input_rows = input.len();
    trace.input_vertices = source_vertices(&graph.edges).len();
    trace.total_rows_written += graph.len();
    trace.note_live_edges(input.len() + graph.len());
    let limit = cfg.round_limit(trace.input_vertices)?;

    while !graph.is_empty() {
        let round = graph.round + 1;
        if round > limit {
            return Err(EngineError::MaxRoundsExceeded {
                limit,
                trace: Box::new(std::mem::take(trace)),
            });
        }
        let vertices = graph.vertices();
        let order = cfg.method.instantiate(cfg.seed, round as u64, &vertices);
        let reps = compute_representatives(&graph, &order)?;
        let (next, rows) = contract_edges(&graph, &reps)?;

        trace.note_live_edges(graph.len() + next.len());
        trace.note_vertex_table(reps.len());
        if let Some(key) = order.affine_key() {
            trace.round_keys.push(key);
        }
        let mut stats = RoundStats {
            round,
            vertices_before: vertices.len(),
            vertices_after: reps.distinct_representatives(),
            edges_before: graph.len(),
            edges_after: rows,
            rows_written: reps.len() + rows,
        };
        stats.rows_written += sink(Round { order, reps }, trace);
        trace.total_rows_written += stats.rows_written;
        trace.rounds.push(stats);
        graph = next;
    }
    Ok(())
}

/// Lean variant: one composition table `L`, updated each round with a left
/// outer join against `R` and `coalesce(R.r, h(L.r))` for rows without a match.
pub fn run_lean(
    input: &EdgeTable,
    cfg: &EngineConfig,
) -> Result<(Labeling, ContractionTrace), EngineError> {
    let mut trace = ContractionTrace::default();
    let mut composition: Option<KeyedTable> = None;
    contract_all(input, cfg, &mut trace, |round, trace| {
        let Round { order, reps } = round;
        match composition.take() {
            None => {
                composition = Some(reps.into_table());
                0
            }
            Some(l) => {
                let next = l.compose_with(&reps.table, |x| order.relabel(x));
                trace.note_vertex_table(next.len());
                let written = next.len();
                composition = Some(next);
                written
            }
        }
    })?;
    let labeling = composition
        .map(|l| l.into_rows().into_iter().collect())
        .unwrap_or_default();
    Ok((labeling, trace))
}

/// Fast variant: keep every `R_i`, then fold them back to front. Needs
/// orderings with a closed-form affine key (Affine, or MinId as the identity).
pub fn run_fast(
    input: &EdgeTable,
    cfg: &EngineConfig,
) -> Result<(Labeling, ContractionTrace), EngineError> {
    if !matches!(cfg.method, OrderingFamily::Affine | OrderingFamily::MinId) {
        return Err(EngineError::UnsupportedMethod {
            method: cfg.method.name(),
            variant: Variant::Fast.name(),
        });
    }
    let mut trace = ContractionTrace::default();
    let mut tables: Vec<KeyedTable> = Vec::new();
    contract_all(input, cfg, &mut trace, |round, _| {
        tables.push(round.reps.into_table());
        0
    })?;

    let accumulators = fold_accumulators(&trace.round_keys);
    while tables.len() > 1 {
        let right = tables.pop().expect("len > 1");
        let left = tables.pop().expect("len > 1");
        let acc = accumulators[tables.len()];
        let merged = left.compose_with(&right, |x| acc.apply(x));
        trace.total_rows_written += merged.len();
        tables.push(merged);
    }
    let labeling = tables
        .pop()
        .map(|t| t.into_rows().into_iter().collect())
        .unwrap_or_default();
    Ok((labeling, trace))
}

/// Runs the variant selected in `cfg`.
pub fn run(
    input: &EdgeTable,
    cfg: &EngineConfig,
) -> Result<(Labeling, ContractionTrace), EngineError> {
    match cfg.variant {
        Variant::Lean => run_lean(input, cfg),
        Variant::Fast => run_fast(input, cfg),
    }
}
