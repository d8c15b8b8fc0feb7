//! Relational primitives shared by the engine and the baselines.
//!
//! Tables are plain vectors kept sorted by their key column so grouping is a
//! linear scan and joins are binary searches. Work is split over row chunks
//! with rayon; every output is sorted afterwards so results do not depend on
//! the chunking.

use rayon::prelude::*;

use crate::graph::{Edge, VertexId};

/// Sorted `(key, value)` table with unique keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyedTable {
    rows: Vec<(VertexId, u64)>,
}

impl KeyedTable {
    /// Builds from rows that are already sorted by key with unique keys.
    pub(crate) fn from_sorted(rows: Vec<(VertexId, u64)>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
        KeyedTable { rows }
    }

    pub fn from_unsorted(mut rows: Vec<(VertexId, u64)>) -> Self {
        rows.par_sort_unstable_by_key(|r| r.0);
        rows.dedup_by_key(|r| r.0);
        KeyedTable { rows }
    }

    #[inline]
    pub fn get(&self, key: VertexId) -> Option<u64> {
        self.rows
            .binary_search_by_key(&key, |r| r.0)
            .ok()
            .map(|i| self.rows[i].1)
    }

    pub fn rows(&self) -> &[(VertexId, u64)] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<(VertexId, u64)> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of distinct values.
    pub fn distinct_values(&self) -> usize {
        let mut vals: Vec<u64> = self.rows.iter().map(|r| r.1).collect();
        vals.par_sort_unstable();
        vals.dedup();
        vals.len()
    }

    /// `select L.k, coalesce(R.value, fallback(L.value)) from self L left outer join right R on L.value = R.k`.
    pub fn compose_with<F>(&self, right: &KeyedTable, fallback: F) -> KeyedTable
    where
        F: Fn(u64) -> u64 + Sync,
    {
        let rows = self
            .rows
            .par_iter()
            .map(|&(k, v)| (k, right.get(v).unwrap_or_else(|| fallback(v))))
            .collect();
        KeyedTable { rows }
    }
}

/// Start offsets of each run of equal `v` in a table sorted by `v`.
fn group_bounds(edges: &[Edge]) -> Vec<usize> {
    let mut starts = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if i == 0 || edges[i - 1].v != e.v {
            starts.push(i);
        }
    }
    starts.push(edges.len());
    starts
}

/// `select v, agg(v, w...) from E group by v` for an edge table sorted by `v`.
/// `agg` sees the group key and its (non-empty) run of rows.
pub fn group_by_source<F, E>(edges: &[Edge], agg: F) -> Result<KeyedTable, E>
where
    F: Fn(VertexId, &[Edge]) -> Result<u64, E> + Sync,
    E: Send,
{
    debug_assert!(edges.windows(2).all(|w| w[0].v <= w[1].v));
    let bounds = group_bounds(edges);
    let rows = bounds
        .par_windows(2)
        .map(|w| {
            let run = &edges[w[0]..w[1]];
            agg(run[0].v, run).map(|value| (run[0].v, value))
        })
        .collect::<Result<Vec<_>, E>>()?;
    Ok(KeyedTable::from_sorted(rows))
}

/// `select distinct V.r, W.r from E, map V, map W where E.v = V.k and E.w = W.k and V.r != W.r`.
/// Returns `None` if some endpoint has no row in `map`. The output is sorted.
pub fn relabel_edges(edges: &[Edge], map: &KeyedTable) -> Option<Vec<Edge>> {
    let mut out = edges
        .par_iter()
        .filter_map(|e| match (map.get(e.v), map.get(e.w)) {
            (Some(a), Some(b)) if a == b => None,
            (Some(a), Some(b)) => Some(Some(Edge::new(a, b))),
            _ => Some(None),
        })
        .collect::<Option<Vec<Edge>>>()?;
    out.par_sort_unstable();
    out.dedup();
    Some(out)
}

/// Distinct values of the `v` column of a table sorted by `v`.
pub fn source_vertices(edges: &[Edge]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = Vec::new();
    for e in edges {
        if out.last() != Some(&e.v) {
            out.push(e.v);
        }
    }
    out
}
