//! Per-round statistics of a contraction run.

use std::io::{self, Write};

use crate::field::AffineKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStats {
    pub round: usize,
    /// Vertices with at least one row in the round's edge table.
    pub vertices_before: usize,
    /// Distinct representatives chosen this round.
    pub vertices_after: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    /// Rows materialised this round (R, T and, for the lean variant, L).
    pub rows_written: usize,
}

impl RoundStats {
    /// Shrinkage factor of the round.
    pub fn gamma(&self) -> f64 {
        self.vertices_after as f64 / self.vertices_before as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContractionTrace {
    pub rounds: Vec<RoundStats>,
    /// Rows of the raw input table.
    pub input_rows: usize,
    /// Distinct vertices of the input.
    pub input_vertices: usize,
    /// Largest number of edge rows alive at the same time (input, E and T).
    pub peak_live_rows: usize,
    /// Largest single vertex table (R, R_i or L) materialised.
    pub max_vertex_table_rows: usize,
    pub total_rows_written: usize,
    /// Per-round affine keys, when the ordering has one.
    pub round_keys: Vec<AffineKey>,
}

impl ContractionTrace {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub(crate) fn note_live_edges(&mut self, rows: usize) {
        self.peak_live_rows = self.peak_live_rows.max(rows);
    }

    pub(crate) fn note_vertex_table(&mut self, rows: usize) {
        self.max_vertex_table_rows = self.max_vertex_table_rows.max(rows);
    }

    /// Line-delimited export: a `#` header, then one tab-separated record per round.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(
            sink,
            "# round\tvertices_before\tvertices_after\tedges_before\tedges_after\trows_written"
        )?;
        for r in &self.rounds {
            writeln!(
                sink,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.round,
                r.vertices_before,
                r.vertices_after,
                r.edges_before,
                r.edges_after,
                r.rows_written
            )?;
        }
        sink.flush()
    }
}
