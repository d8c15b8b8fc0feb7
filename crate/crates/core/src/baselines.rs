//! Reference algorithms: a union-find oracle and naive minimum propagation.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EdgeTable, Labeling, VertexId};
use crate::table::{group_by_source, KeyedTable};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("no fixpoint after {steps} steps")]
    NotConverged { steps: usize, partial: Labeling },
    #[error("max_steps must be at least 1")]
    InvalidStepLimit,
}

/// Union by rank with path compression over dense indices.
#[derive(Debug, Clone)]
pub struct DisjointSetForest {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSetForest {
    pub fn new(len: usize) -> Self {
        DisjointSetForest {
            parent: (0..len).collect(),
            rank: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if both were already in the same set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Exact components, labelled by their minimum member.
pub fn union_find_components(table: &EdgeTable) -> Labeling {
    let mut index: HashMap<VertexId, usize> = HashMap::new();
    let mut ids: Vec<VertexId> = Vec::new();
    let mut dense = |v: VertexId, ids: &mut Vec<VertexId>| {
        *index.entry(v).or_insert_with(|| {
            ids.push(v);
            ids.len() - 1
        })
    };
    let pairs: Vec<(usize, usize)> = table
        .rows()
        .iter()
        .map(|e| (dense(e.v, &mut ids), dense(e.w, &mut ids)))
        .collect();

    let mut forest = DisjointSetForest::new(ids.len());
    for (a, b) in pairs {
        forest.union(a, b);
    }
    let mut min_of_root: HashMap<usize, VertexId> = HashMap::new();
    for (i, &v) in ids.iter().enumerate() {
        let root = forest.find(i);
        let m = min_of_root.entry(root).or_insert(v);
        *m = (*m).min(v);
    }
    ids.iter()
        .enumerate()
        .map(|(i, &v)| (v, min_of_root[&forest.find(i)]))
        .collect()
}

/// Repeats `label(v) := min(label(v), min label(w))` over the closed
/// neighbourhood until nothing changes. Returns the labeling and the number of
/// steps that changed at least one label.
pub fn naive_min_propagation(
    table: &EdgeTable,
    max_steps: usize,
) -> Result<(Labeling, usize), BaselineError> {
    if max_steps == 0 {
        return Err(BaselineError::InvalidStepLimit);
    }
    let edges = table.symmetrize().into_rows();
    let mut labels =
        KeyedTable::from_unsorted(edges.iter().map(|e| (e.v, e.v)).collect::<Vec<_>>());
    let mut steps = 0;
    loop {
        let next = group_by_source(&edges, |v, run| {
            let own = labels.get(v).expect("every source has a label");
            Ok::<_, std::convert::Infallible>(
                run.iter()
                    .map(|e| labels.get(e.w).expect("symmetric table"))
                    .fold(own, u64::min),
            )
        })
        .unwrap_or_else(|e| match e {});
        if next == labels {
            return Ok((labels.into_rows().into_iter().collect(), steps));
        }
        if steps == max_steps {
            return Err(BaselineError::NotConverged {
                steps,
                partial: labels.into_rows().into_iter().collect(),
            });
        }
        labels = next;
        steps += 1;
    }
}
