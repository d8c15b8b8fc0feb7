//! Connected components by Randomised Contraction.
//!
//! The engine treats a graph as a relational edge table and repeatedly
//! contracts every vertex onto the smallest-keyed member of its closed
//! neighbourhood, re-randomising the key order every round. The expected
//! number of rounds is logarithmic in the vertex count on every input.
//!
//! Modules:
//!
//! * [`graph`]: edge tables, labelings, text formats.
//! * [`field`]: GF(2^64) arithmetic and the vertex orderings.
//! * [`engine`]: the contraction rounds and the lean/fast composition variants.
//! * [`bounds`]: exhaustive and Monte Carlo contraction-factor measurements.
//! * [`generators`]: seeded graph families.
//! * [`baselines`]: union-find oracle and naive min-propagation.
//! * [`sql`]: SQL text for running the algorithm in a database.

pub mod baselines;
pub mod bounds;
pub mod engine;
pub mod field;
pub mod generators;
pub mod graph;
pub mod sql;
pub mod table;
pub mod trace;

pub use engine::{run, run_fast, run_lean, EngineConfig, EngineError, Variant};
pub use field::{AffineKey, Gf64, OrderingFamily};
pub use graph::{parse_edge_list, partitions_equal, Edge, EdgeTable, Labeling, VertexId};
pub use trace::{ContractionTrace, RoundStats};
