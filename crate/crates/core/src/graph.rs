//! Edge tables, labelings and their text formats.
//!
//! An [`EdgeTable`] is the relational `E(v, w)` table the engine works on.
//! Isolated vertices only exist as loop rows `(v, v)`; a vertex that appears in
//! no row is not part of the graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

pub type VertexId = u64;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex id `{token}` does not fit in 64 bits")]
    Range { line: usize, token: String },
    #[error("line {line}: vertex {vertex} labelled twice")]
    DuplicateVertex { line: usize, vertex: VertexId },
    #[error("labelings cover different vertex sets (missing from left: {missing_left:?}, missing from right: {missing_right:?})")]
    DomainMismatch {
        missing_left: Vec<VertexId>,
        missing_right: Vec<VertexId>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub v: VertexId,
    pub w: VertexId,
}

impl Edge {
    pub const fn new(v: VertexId, w: VertexId) -> Self {
        Edge { v, w }
    }

    pub const fn is_loop(&self) -> bool {
        self.v == self.w
    }

    pub const fn reversed(&self) -> Self {
        Edge {
            v: self.w,
            w: self.v,
        }
    }
}

impl From<(VertexId, VertexId)> for Edge {
    fn from((v, w): (VertexId, VertexId)) -> Self {
        Edge { v, w }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EdgeTable {
    rows: Vec<Edge>,
    symmetric: bool,
}

impl EdgeTable {
    /// A raw table. Loops and duplicate rows are kept as given.
    pub fn from_rows(rows: Vec<Edge>) -> Self {
        EdgeTable {
            rows,
            symmetric: false,
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        Self::from_rows(pairs.into_iter().map(Edge::from).collect())
    }

    pub fn rows(&self) -> &[Edge] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Edge> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Distinct vertex IDs across both columns, ascending.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut ids: Vec<VertexId> = self.rows.iter().flat_map(|e| [e.v, e.w]).collect();
        ids.par_sort_unstable();
        ids.dedup();
        ids
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    /// `select v, w from G union all select w, v from G`, followed by the
    /// duplicate elimination the later rounds would apply anyway.
    pub fn symmetrize(&self) -> EdgeTable {
        if self.symmetric {
            return self.clone();
        }
        let mut rows: Vec<Edge> = Vec::with_capacity(self.rows.len() * 2);
        for e in &self.rows {
            rows.push(*e);
            if !e.is_loop() {
                rows.push(e.reversed());
            }
        }
        rows.par_sort_unstable();
        rows.dedup();
        EdgeTable {
            rows,
            symmetric: true,
        }
    }

    /// Set equality of the row collections; row order and multiplicity are ignored.
    pub fn same_rows(&self, other: &EdgeTable) -> bool {
        let a: BTreeSet<Edge> = self.rows.iter().copied().collect();
        let b: BTreeSet<Edge> = other.rows.iter().copied().collect();
        a == b
    }

    pub fn write_to<W: Write>(&self, mut sink: W) -> io::Result<usize> {
        for e in &self.rows {
            writeln!(sink, "{}\t{}", e.v, e.w)?;
        }
        sink.flush()?;
        Ok(self.rows.len())
    }
}

impl FromIterator<Edge> for EdgeTable {
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        Self::from_rows(iter.into_iter().collect())
    }
}

fn parse_id(token: &str, line: usize) -> Result<VertexId, GraphError> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(GraphError::Parse {
            line,
            message: format!("`{token}` is not an unsigned decimal integer"),
        });
    }
    token.parse::<VertexId>().map_err(|_| GraphError::Range {
        line,
        token: token.to_owned(),
    })
}

/// Splits a data line into exactly two decimal IDs.
fn parse_pair(text: &str, line: usize) -> Result<(VertexId, VertexId), GraphError> {
    let mut fields = text.split_ascii_whitespace();
    let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
        return Err(GraphError::Parse {
            line,
            message: "expected two vertex ids".into(),
        });
    };
    if let Some(extra) = fields.next() {
        return Err(GraphError::Parse {
            line,
            message: format!("unexpected trailing field `{extra}`"),
        });
    }
    Ok((parse_id(a, line)?, parse_id(b, line)?))
}

fn is_skipped(text: &str) -> bool {
    let t = text.trim();
    t.is_empty() || t.starts_with('#')
}

/// Streaming reader over an edge-list file. Holds one line in memory at a time.
pub struct EdgeReader<R> {
    source: R,
    buf: String,
    line: usize,
    failed: bool,
}

impl<R: BufRead> EdgeReader<R> {
    pub fn new(source: R) -> Self {
        EdgeReader {
            source,
            buf: String::new(),
            line: 0,
            failed: false,
        }
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<Edge, GraphError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.source.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(if e.kind() == io::ErrorKind::InvalidData {
                        GraphError::Parse {
                            line: self.line + 1,
                            message: "line is not valid UTF-8".into(),
                        }
                    } else {
                        e.into()
                    }));
                }
            }
            self.line += 1;
            if is_skipped(&self.buf) {
                continue;
            }
            let parsed = parse_pair(&self.buf, self.line).map(Edge::from);
            self.failed = parsed.is_err();
            return Some(parsed);
        }
    }
}

/// Reads a whole edge list. Loops and duplicates are preserved.
pub fn parse_edge_list<R: BufRead>(source: R) -> Result<EdgeTable, GraphError> {
    let rows = EdgeReader::new(source).collect::<Result<Vec<_>, _>>()?;
    Ok(EdgeTable::from_rows(rows))
}

/// Total map from original vertex IDs to component labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling {
    entries: BTreeMap<VertexId, u64>,
}

impl Labeling {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VertexId, label: u64) -> Option<u64> {
        self.entries.insert(v, label)
    }

    pub fn get(&self, v: VertexId) -> Option<u64> {
        self.entries.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.entries.iter().map(|(&v, &l)| (v, l))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.entries.keys().copied()
    }

    pub fn component_count(&self) -> usize {
        self.entries.values().collect::<BTreeSet<_>>().len()
    }

    /// Components as sorted member lists, ordered by their smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut groups: HashMap<u64, Vec<VertexId>> = HashMap::new();
        for (v, l) in self.iter() {
            groups.entry(l).or_default().push(v);
        }
        let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
        // members are pushed in ascending order already
        out.sort_unstable_by_key(|c| c[0]);
        out
    }
}

impl FromIterator<(VertexId, u64)> for Labeling {
    fn from_iter<T: IntoIterator<Item = (VertexId, u64)>>(iter: T) -> Self {
        Labeling {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Writes one `v<TAB>label` line per vertex, ascending by `v`.
pub fn write_labeling<W: Write>(labeling: &Labeling, mut sink: W) -> io::Result<usize> {
    for (v, l) in labeling.iter() {
        writeln!(sink, "{v}\t{l}")?;
    }
    sink.flush()?;
    Ok(labeling.len())
}

/// Reads a labeling file (`v<TAB>label`). Rows may come in any order but each
/// vertex may appear only once.
pub fn parse_labeling<R: BufRead>(source: R) -> Result<Labeling, GraphError> {
    let mut entries = BTreeMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let text = line.map_err(|e| {
            if e.kind() == io::ErrorKind::InvalidData {
                GraphError::Parse {
                    line: line_no,
                    message: "line is not valid UTF-8".into(),
                }
            } else {
                e.into()
            }
        })?;
        if is_skipped(&text) {
            continue;
        }
        let (v, label) = parse_pair(&text, line_no)?;
        if entries.insert(v, label).is_some() {
            return Err(GraphError::DuplicateVertex {
                line: line_no,
                vertex: v,
            });
        }
    }
    Ok(Labeling { entries })
}

fn check_same_domain(a: &Labeling, b: &Labeling) -> Result<(), GraphError> {
    if a.len() == b.len() && a.entries.keys().eq(b.entries.keys()) {
        return Ok(());
    }
    let missing_left = b.vertices().filter(|v| a.get(*v).is_none()).collect();
    let missing_right = a.vertices().filter(|v| b.get(*v).is_none()).collect();
    Err(GraphError::DomainMismatch {
        missing_left,
        missing_right,
    })
}

/// First pair of vertices on which two labelings disagree about membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionMismatch {
    pub u: VertexId,
    pub w: VertexId,
    pub together_in_left: bool,
}

/// Finds a witness that two labelings induce different partitions, if any.
pub fn partition_mismatch(
    a: &Labeling,
    b: &Labeling,
) -> Result<Option<PartitionMismatch>, GraphError> {
    check_same_domain(a, b)?;
    // The partitions agree iff the label pairing is a bijection between label sets.
    let mut a_to_b: HashMap<u64, (u64, VertexId)> = HashMap::new();
    let mut b_to_a: HashMap<u64, (u64, VertexId)> = HashMap::new();
    for ((v, la), (_, lb)) in a.iter().zip(b.iter()) {
        if let Some(&(seen_b, first)) = a_to_b.get(&la) {
            if seen_b != lb {
                return Ok(Some(PartitionMismatch {
                    u: first,
                    w: v,
                    together_in_left: true,
                }));
            }
        } else {
            a_to_b.insert(la, (lb, v));
        }
        if let Some(&(seen_a, first)) = b_to_a.get(&lb) {
            if seen_a != la {
                return Ok(Some(PartitionMismatch {
                    u: first,
                    w: v,
                    together_in_left: false,
                }));
            }
        } else {
            b_to_a.insert(lb, (la, v));
        }
    }
    Ok(None)
}

/// True iff both labelings induce the same partition of their (shared) vertex set.
pub fn partitions_equal(a: &Labeling, b: &Labeling) -> Result<bool, GraphError> {
    partition_mismatch(a, b).map(|m| m.is_none())
}

/// Relabels every component by its minimum member.
pub fn canonicalize(labeling: &Labeling) -> Labeling {
    let mut min_member: HashMap<u64, VertexId> = HashMap::new();
    // iteration is ascending by vertex, so the first hit is the minimum
    for (v, l) in labeling.iter() {
        min_member.entry(l).or_insert(v);
    }
    labeling.iter().map(|(v, l)| (v, min_member[&l])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "1 5\n1 10\n2 4\n2 9\n3 8\n3 10\n4 9\n5 6\n5 7\n6 10\n";

    fn lab(pairs: &[(u64, u64)]) -> Labeling {
        pairs.iter().copied().collect()
    }

    #[test]
    fn parses_ten_vertex_example() {
        let t = parse_edge_list(FIG1.as_bytes()).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.rows()[5], Edge::new(3, 10));
        assert!(!t.is_symmetric());
    }

    #[test]
    fn parses_empty_and_comments() {
        assert!(parse_edge_list("".as_bytes()).unwrap().is_empty());
        let t = parse_edge_list("# header\n\n   \n7 7\n# tail\n".as_bytes()).unwrap();
        assert_eq!(t.rows(), &[Edge::new(7, 7)]);
    }

    #[test]
    fn keeps_duplicates_and_tabs() {
        let t = parse_edge_list("1\t2\n1 2\n  3   4  \r\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.rows()[2], Edge::new(3, 4));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_list("1 2\n# c\n3 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
        let err = parse_edge_list("1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
        let err = parse_edge_list("-1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
    }

    #[test]
    fn overflow_is_a_range_error() {
        let ok = parse_edge_list("18446744073709551615 0\n".as_bytes()).unwrap();
        assert_eq!(ok.rows()[0].v, u64::MAX);
        let err = parse_edge_list("0 0\n18446744073709551616 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Range { line: 2, .. }), "{err}");
    }

    #[test]
    fn symmetrize_examples() {
        let fig1 = parse_edge_list(FIG1.as_bytes()).unwrap().symmetrize();
        assert_eq!(fig1.len(), 20);
        assert!(fig1.is_symmetric());

        let lp = EdgeTable::from_pairs([(7, 7)]).symmetrize();
        assert_eq!(lp.rows(), &[Edge::new(7, 7)]);

        let both = EdgeTable::from_pairs([(1, 2), (2, 1)]).symmetrize();
        assert_eq!(both.rows(), &[Edge::new(1, 2), Edge::new(2, 1)]);
    }

    #[test]
    fn write_labeling_examples() {
        let mut out = Vec::new();
        assert_eq!(
            write_labeling(&lab(&[(2, 9), (1, 9)]), &mut out).unwrap(),
            2
        );
        assert_eq!(out, b"1\t9\n2\t9\n");

        let mut out = Vec::new();
        assert_eq!(write_labeling(&Labeling::new(), &mut out).unwrap(), 0);
        assert!(out.is_empty());
    }

    #[test]
    fn labeling_file_round_trip() {
        let l = lab(&[(1, 3), (2, 3), (10, 4)]);
        let mut out = Vec::new();
        write_labeling(&l, &mut out).unwrap();
        assert_eq!(parse_labeling(out.as_slice()).unwrap(), l);
        let err = parse_labeling("1\t2\n1\t3\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            GraphError::DuplicateVertex { line: 2, vertex: 1 }
        ));
    }

    #[test]
    fn partition_equality() {
        let a = lab(&[(1, 7), (2, 7), (3, 4)]);
        let b = lab(&[(1, 0), (2, 0), (3, 1)]);
        assert!(partitions_equal(&a, &b).unwrap());

        let a = lab(&[(1, 7), (2, 7)]);
        let b = lab(&[(1, 0), (2, 1)]);
        assert!(!partitions_equal(&a, &b).unwrap());
        let m = partition_mismatch(&a, &b).unwrap().unwrap();
        assert_eq!((m.u, m.w, m.together_in_left), (1, 2, true));

        // split on the right side only shows up through the reverse map
        let m = partition_mismatch(&b, &a).unwrap().unwrap();
        assert_eq!((m.u, m.w, m.together_in_left), (1, 2, false));
    }

    #[test]
    fn partition_domain_mismatch() {
        let a = lab(&[(1, 0), (2, 0)]);
        let b = lab(&[(1, 0), (3, 0)]);
        match partitions_equal(&a, &b).unwrap_err() {
            GraphError::DomainMismatch {
                missing_left,
                missing_right,
            } => {
                assert_eq!(missing_left, vec![3]);
                assert_eq!(missing_right, vec![2]);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&lab(&[(5, 42), (9, 42)]));
        assert_eq!(c, lab(&[(5, 5), (9, 5)]));
        assert!(canonicalize(&Labeling::new()).is_empty());
        let c = canonicalize(&lab(&[(4, 1), (3, 0), (8, 1), (2, 0)]));
        assert_eq!(c, lab(&[(2, 2), (3, 2), (4, 4), (8, 4)]));
        assert_eq!(c.components(), vec![vec![2, 3], vec![4, 8]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn table() -> impl Strategy<Value = EdgeTable> {
            prop::collection::vec((0u64..40, 0u64..40), 0..60).prop_map(EdgeTable::from_pairs)
        }

        fn labeling() -> impl Strategy<Value = Labeling> {
            prop::collection::vec(0u64..5, 1..20).prop_map(|ls| {
                ls.into_iter()
                    .enumerate()
                    .map(|(v, l)| (v as u64, l))
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn symmetrize_is_idempotent_and_symmetric(t in table()) {
                let s = t.symmetrize();
                let ss = EdgeTable::from_rows(s.rows().to_vec()).symmetrize();
                prop_assert!(s.same_rows(&ss));
                prop_assert!(s.len() <= 2 * t.len());
                let set: BTreeSet<Edge> = s.rows().iter().copied().collect();
                prop_assert_eq!(set.len(), s.len());
                for e in s.rows() {
                    prop_assert!(set.contains(&e.reversed()));
                }
                let left: BTreeSet<u64> = s.rows().iter().map(|e| e.v).collect();
                prop_assert_eq!(left.len(), s.vertex_count());
                prop_assert_eq!(t.vertex_count(), s.vertex_count());
            }

            #[test]
            fn edge_list_text_round_trip(t in table()) {
                let mut out = Vec::new();
                t.write_to(&mut out).unwrap();
                let back = parse_edge_list(out.as_slice()).unwrap();
                prop_assert_eq!(back.rows(), t.rows());
            }

            #[test]
            fn canonicalize_is_a_fixed_point(l in labeling()) {
                let c = canonicalize(&l);
                prop_assert!(partitions_equal(&l, &c).unwrap());
                prop_assert_eq!(canonicalize(&c), c);
            }

            #[test]
            fn partitions_equal_is_an_equivalence(
                a in labeling(), b in labeling(), c in labeling()
            ) {
                prop_assert!(partitions_equal(&a, &a).unwrap());
                let n = a.len().min(b.len()).min(c.len()) as u64;
                let cut = |l: &Labeling| -> Labeling { l.iter().filter(|(v, _)| *v < n).collect() };
                let (a, b, c) = (cut(&a), cut(&b), cut(&c));
                let ab = partitions_equal(&a, &b).unwrap();
                prop_assert_eq!(ab, partitions_equal(&b, &a).unwrap());
                if ab && partitions_equal(&b, &c).unwrap() {
                    prop_assert!(partitions_equal(&a, &c).unwrap());
                }
            }
        }
    }
}
