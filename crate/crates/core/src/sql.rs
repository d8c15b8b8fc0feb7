//! SQL text for running the contraction inside a relational database.
//!
//! The output is a template in a generic ANSI-style dialect. A driver runs the
//! statements in order, substitutes the per-round placeholders and loops as
//! the comments describe. Placeholders:
//!
//! * `A`, `B`: the round's key, `A <> 0`, drawn fresh every round.
//! * `{i}`, `{i+1}`: round indices in table names (fast variant only).
//! * `alpha`, `beta`: a key popped from the driver's key stack (fast fold).

use std::fmt::Write;

use crate::engine::Variant;
use crate::field::REDUCTION_POLY_TEXT;

/// Smallest prime above 2^64, so every 64-bit vertex ID is a field element.
pub const DEFAULT_PRIME: &str = "18446744073709551629";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldMode {
    /// An external `axb(A, x, B)` UDF over GF(2^64).
    Gf64Udf,
    /// Inline arithmetic modulo a prime larger than every vertex ID.
    PrimeModulus { prime: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlOptions {
    pub variant: Variant,
    pub field: FieldMode,
    /// Input table with columns `v`, `w`.
    pub table: String,
}

impl SqlOptions {
    pub fn new(variant: Variant, field: FieldMode, table: impl Into<String>) -> Self {
        SqlOptions {
            variant,
            field,
            table: table.into(),
        }
    }
}

/// `A*x + B` in the chosen field, as SQL.
fn affine(field: &FieldMode, a: &str, x: &str, b: &str) -> String {
    match field {
        FieldMode::Gf64Udf => format!("axb({a}, {x}, {b})"),
        FieldMode::PrimeModulus { prime } => {
            format!("mod(cast({a} as numeric(40, 0)) * {x} + {b}, {prime})")
        }
    }
}

fn header(out: &mut String, opts: &SqlOptions) {
    let variant = match opts.variant {
        Variant::Lean => "lean variant, deterministic space",
        Variant::Fast => "fast variant, expected linear space",
    };
    writeln!(
        out,
        "-- Randomised Contraction connected components ({variant})"
    )
    .unwrap();
    writeln!(
        out,
        "-- input: {}(v, w), one row per undirected edge; isolated vertices as loop rows",
        opts.table
    )
    .unwrap();
    writeln!(
        out,
        "-- output: Result(v, r), r equal for exactly the vertices of one component"
    )
    .unwrap();
    match &opts.field {
        FieldMode::Gf64Udf => {
            writeln!(
                out,
                "-- field: GF(2^64), reduction polynomial {REDUCTION_POLY_TEXT}"
            )
            .unwrap();
            writeln!(
                out,
                "-- axb(A, x, B) is an external UDF computing A*x + B in that field"
            )
            .unwrap();
        }
        FieldMode::PrimeModulus { prime } => {
            writeln!(
                out,
                "-- field: GF(p), p = {prime}; p must exceed every vertex id"
            )
            .unwrap();
            writeln!(
                out,
                "-- A*x + B is computed inline with integer arithmetic mod p"
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        "-- placeholders: A, B = the round's key (A <> 0), drawn uniformly at random every round"
    )
    .unwrap();
    writeln!(out).unwrap();
    writeln!(out, "create table E as").unwrap();
    writeln!(
        out,
        "  select v, w from {t} union all select w, v from {t};",
        t = opts.table
    )
    .unwrap();
    writeln!(out).unwrap();
}

fn representatives(out: &mut String, field: &FieldMode, table: &str) {
    writeln!(out, "create table {table} as").unwrap();
    writeln!(
        out,
        "  select v, least({}, min({})) as r",
        affine(field, "A", "v", "B"),
        affine(field, "A", "w", "B")
    )
    .unwrap();
    writeln!(out, "  from E group by v;").unwrap();
}

fn contraction(out: &mut String, reps: &str) {
    writeln!(out, "create table T as").unwrap();
    writeln!(out, "  select distinct V.r as v, W.r as w").unwrap();
    writeln!(out, "  from E, {reps} as V, {reps} as W").unwrap();
    writeln!(out, "  where E.v = V.v and E.w = W.v and V.r != W.r;").unwrap();
    writeln!(
        out,
        "-- rowcount <- number of rows generated by the previous statement"
    )
    .unwrap();
    writeln!(out, "drop table E;").unwrap();
    writeln!(out, "alter table T rename to E;").unwrap();
}

fn lean(out: &mut String, opts: &SqlOptions) {
    let f = &opts.field;
    writeln!(out, "-- repeat the block below until rowcount = 0").unwrap();
    writeln!(out, "-- begin round").unwrap();
    representatives(out, f, "R");
    contraction(out, "R");
    writeln!(out, "-- first round only:").unwrap();
    writeln!(out, "--   alter table R rename to L;").unwrap();
    writeln!(out, "-- every later round:").unwrap();
    writeln!(out, "create table T as").unwrap();
    writeln!(
        out,
        "  select L.v as v, coalesce(R.r, {}) as r",
        affine(f, "A", "L.r", "B")
    )
    .unwrap();
    writeln!(out, "  from L left outer join R on (L.r = R.v);").unwrap();
    writeln!(out, "drop table L;").unwrap();
    writeln!(out, "drop table R;").unwrap();
    writeln!(out, "alter table T rename to L;").unwrap();
    writeln!(out, "-- end round").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "alter table L rename to Result;").unwrap();
}

fn fast(out: &mut String, opts: &SqlOptions) {
    let f = &opts.field;
    writeln!(
        out,
        "-- contraction loop: i = 1, 2, ... until rowcount = 0; push (A, B) onto the key stack"
    )
    .unwrap();
    writeln!(out, "-- begin round i").unwrap();
    representatives(out, f, "R_{i}");
    contraction(out, "R_{i}");
    writeln!(out, "-- end round i; k = number of rounds").unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "-- fold loop: (A, B) <- (1, 0); for i = k-1 down to 1:"
    )
    .unwrap();
    writeln!(out, "--   pop (alpha, beta) from the key stack").unwrap();
    writeln!(out, "--   (A,B) <- (A*alpha, A*beta+B)").unwrap();
    writeln!(
        out,
        "--   i.e. A <- {}, B <- {}",
        affine(f, "A", "alpha", "0"),
        affine(f, "A", "beta", "B")
    )
    .unwrap();
    writeln!(out, "-- begin fold step i").unwrap();
    writeln!(out, "create table T as").unwrap();
    writeln!(
        out,
        "  select L.v as v, coalesce(R.r, {}) as r",
        affine(f, "A", "L.r", "B")
    )
    .unwrap();
    writeln!(
        out,
        "  from R_{{i}} as L left outer join R_{{i+1}} as R on (L.r = R.v);"
    )
    .unwrap();
    writeln!(out, "drop table R_{{i}};").unwrap();
    writeln!(out, "drop table R_{{i+1}};").unwrap();
    writeln!(out, "alter table T rename to R_{{i}};").unwrap();
    writeln!(out, "-- end fold step i").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "alter table R_1 rename to Result;").unwrap();
}

/// The full statement sequence for `opts`. A pure function of its input.
pub fn emit_sql(opts: &SqlOptions) -> String {
    let mut out = String::new();
    header(&mut out, opts);
    match opts.variant {
        Variant::Lean => lean(&mut out, opts),
        Variant::Fast => fast(&mut out, opts),
    }
    out
}
