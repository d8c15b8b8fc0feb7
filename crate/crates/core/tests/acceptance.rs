//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use randcc::baselines::union_find_components;
use randcc::bounds::{
    exact_expected_representatives, lemma1_check, monte_carlo_gamma, Digraph, GammaMethod,
    LemmaOutcome,
};
use randcc::engine::{compute_representatives, contract_edges, fold_accumulators, RoundGraph};
use randcc::field::{
    axb, gf_mul, gf_mul_reference, invert_key, sample_key, AffineKey, Gf64, VertexOrder,
};
use randcc::generators::{
    gen_directed_cycle, gen_path, gen_random_digraph, Family, GeneratorSpec, PathNumbering,
};
use randcc::graph::partition_mismatch;
use randcc::sql::{emit_sql, FieldMode, SqlOptions};
use randcc::{run_fast, run_lean, EngineConfig, Labeling, OrderingFamily, Variant};

use common::{fig1, zoo, ZooGraph};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn same_partition(name: &str, got: &Labeling, want: &Labeling) -> Result<(), String> {
    match partition_mismatch(got, want) {
        Ok(None) => Ok(()),
        Ok(Some(m)) => Err(format!("{name}: vertices {} and {} disagree", m.u, m.w)),
        Err(e) => Err(format!("{name}: {e}")),
    }
}

fn fig1_golden() -> Outcome {
    let g = RoundGraph::initial(&fig1());
    let r = compute_representatives(&g, &VertexOrder::MinId).map_err(|e| e.to_string())?;
    let want = [
        (1, 1),
        (2, 2),
        (3, 3),
        (4, 2),
        (5, 1),
        (6, 5),
        (7, 5),
        (8, 3),
        (9, 2),
        (10, 1),
    ];
    ensure(r.entries() == want, || {
        format!("representatives {:?}", r.entries())
    })?;
    let (next, _) = contract_edges(&g, &r).map_err(|e| e.to_string())?;
    let undirected: Vec<(u64, u64)> = next
        .edges()
        .iter()
        .filter(|e| e.v < e.w)
        .map(|e| (e.v, e.w))
        .collect();
    ensure(undirected == [(1, 3), (1, 5)], || {
        format!("contracted {undirected:?}")
    })?;
    ensure(next.len() == 4, || {
        format!("{} rows after contraction", next.len())
    })?;
    ensure(!next.vertices().contains(&2), || {
        "vertex 2 still present".into()
    })?;
    Ok("R table and contracted edges {(1,3),(1,5)} exact".into())
}

const ZOO_SEEDS: [u64; 3] = [11, 22, 33];

struct ZooRuns {
    checked: usize,
    failures: Vec<String>,
    space_failures: Vec<String>,
    variant_failures: Vec<String>,
    worst_space_ratio: f64,
}

/// Criteria 2, 9 and 10 share one sweep over the zoo.
fn sweep_zoo(graphs: &[ZooGraph]) -> ZooRuns {
    let mut out = ZooRuns {
        checked: 0,
        failures: Vec::new(),
        space_failures: Vec::new(),
        variant_failures: Vec::new(),
        worst_space_ratio: 0.0,
    };
    for g in graphs {
        let oracle = union_find_components(&g.table);
        for seed in ZOO_SEEDS {
            let mut partitions = Vec::new();
            for variant in [Variant::Lean, Variant::Fast] {
                let cfg = EngineConfig::new(OrderingFamily::Affine, variant, seed);
                let tag = format!("{} {} seed {seed}", g.name, variant.name());
                let result = match variant {
                    Variant::Lean => run_lean(&g.table, &cfg),
                    Variant::Fast => run_fast(&g.table, &cfg),
                };
                let (labels, trace) = match result {
                    Ok(x) => x,
                    Err(e) => {
                        out.failures.push(format!("{tag}: {e}"));
                        continue;
                    }
                };
                out.checked += 1;
                if let Err(e) = same_partition(&tag, &labels, &oracle) {
                    out.failures.push(e);
                }
                let rows = g.table.len().max(1);
                out.worst_space_ratio = out
                    .worst_space_ratio
                    .max(trace.peak_live_rows as f64 / rows as f64);
                if trace.peak_live_rows > 4 * g.table.len() {
                    out.space_failures.push(format!(
                        "{tag}: peak {} rows for {} input rows",
                        trace.peak_live_rows,
                        g.table.len()
                    ));
                }
                if variant == Variant::Lean && trace.max_vertex_table_rows > trace.input_vertices {
                    out.space_failures.push(format!(
                        "{tag}: vertex table of {} rows for {} vertices",
                        trace.max_vertex_table_rows, trace.input_vertices
                    ));
                }
                partitions.push(labels);
            }
            if let [lean, fast] = &partitions[..] {
                if let Err(e) =
                    same_partition(&format!("{} seed {seed} lean/fast", g.name), lean, fast)
                {
                    out.variant_failures.push(e);
                }
            }
        }
    }
    out
}

fn oracle_equivalence(runs: &ZooRuns) -> Outcome {
    ensure(runs.checked == 600 && runs.failures.is_empty(), || {
        format!("{} runs, failures: {:?}", runs.checked, runs.failures)
    })?;
    Ok("100 graphs x {lean, fast} x 3 seeds match union-find".into())
}

fn worst_case_paths() -> Outcome {
    for n in [10u64, 100, 1000] {
        let path = gen_path(n, PathNumbering::Sequential).map_err(|e| e.to_string())?;
        let cfg = EngineConfig::new(OrderingFamily::MinId, Variant::Lean, 0)
            .with_max_rounds(n as usize + 5);
        let (labels, trace) = run_lean(&path, &cfg).map_err(|e| e.to_string())?;
        ensure(trace.round_count() as u64 == n - 1, || {
            format!("n = {n}: {} rounds", trace.round_count())
        })?;
        ensure(labels.component_count() == 1, || {
            format!("n = {n}: split components")
        })?;
    }
    let optimal = gen_path(6, PathNumbering::Optimal).map_err(|e| e.to_string())?;
    let g = RoundGraph::initial(&optimal);
    let r = compute_representatives(&g, &VertexOrder::MinId).map_err(|e| e.to_string())?;
    let (next, _) = contract_edges(&g, &r).map_err(|e| e.to_string())?;
    ensure(next.vertices() == [1, 2], || {
        format!("optimal n = 6 left {:?}", next.vertices())
    })?;
    Ok("n-1 rounds for n in {10, 100, 1000}; optimal n=6 -> 2 vertices in 1 round".into())
}

fn affine_gamma(graphs: &[ZooGraph]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut measured = 0;
    for (i, g) in graphs.iter().enumerate() {
        if g.table.rows().iter().all(|e| e.is_loop()) {
            continue;
        }
        let est = monte_carlo_gamma(&g.table, GammaMethod::Affine, 10_000, 7000 + i as u64)
            .map_err(|e| format!("{}: {e}", g.name))?;
        measured += 1;
        worst = worst.max(est.mean);
        ensure(est.mean <= 0.75 + 4.0 * est.std_error, || {
            format!(
                "{}: mean {:.5} stderr {:.5}",
                g.name, est.mean, est.std_error
            )
        })?;
    }
    Ok(format!(
        "{measured} graphs, largest mean {worst:.4} <= 0.75 + 4 stderr"
    ))
}

fn tight_bound() -> Outcome {
    let cycle = gen_directed_cycle(3).map_err(|e| e.to_string())?;
    let e = exact_expected_representatives(&cycle).map_err(|e| e.to_string())?;
    ensure(e == rat(2, 1), || format!("3-cycle expectation {e}"))?;

    let mut graphs = 0;
    // every digraph on 2..=4 vertices with non-empty out-neighbourhoods
    for n in 2..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let arcs = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p);
            let g = Digraph::new(n, arcs).map_err(|e| e.to_string())?;
            if !g.all_out_neighbourhoods_nonempty() {
                continue;
            }
            let e = exact_expected_representatives(&g).map_err(|e| e.to_string())?;
            ensure(e <= rat(2 * n as i64, 3), || {
                format!("n = {n} mask {mask:#x}: {e}")
            })?;
            graphs += 1;
        }
    }
    for i in 0..300u64 {
        let n = 5 + (i % 2) as usize;
        let p = [0.2, 0.35, 0.5, 0.7][(i / 2 % 4) as usize];
        let g = gen_random_digraph(n, p, 500 + i).map_err(|e| e.to_string())?;
        let e = exact_expected_representatives(&g).map_err(|e| e.to_string())?;
        ensure(e <= rat(2 * n as i64, 3), || {
            format!("random n = {n} seed {}: {e}", 500 + i)
        })?;
        graphs += 1;
    }
    Ok(format!(
        "3-cycle exactly 2; {graphs} digraphs with n <= 6 within 2n/3"
    ))
}

fn lemma_one() -> Outcome {
    let mut violations = Vec::new();
    for i in 0..200u64 {
        let n = 2 + (i % 5) as usize;
        let p = [0.15, 0.3, 0.5, 0.8][(i / 5 % 4) as usize];
        let g = gen_random_digraph(n, p, 9000 + i).map_err(|e| e.to_string())?;
        if let LemmaOutcome::Violated {
            vertex,
            type1,
            type0,
        } = lemma1_check(&g).map_err(|e| e.to_string())?
        {
            violations.push(format!(
                "seed {}: vertex {vertex} ({type1} > {type0})",
                9000 + i
            ));
        }
    }
    ensure(violations.is_empty(), || format!("{violations:?}"))?;
    Ok("200 random digraphs, n in 2..=6, zero violations".into())
}

fn fig11_constant() -> Outcome {
    let table = GeneratorSpec::new(Family::Fig11, 0)
        .build()
        .map_err(|e| e.to_string())?;
    let est =
        monte_carlo_gamma(&table, GammaMethod::Full, 100_000, 2024).map_err(|e| e.to_string())?;
    ensure((est.mean - 0.56343).abs() <= 0.005, || {
        format!("mean {:.5} (stderr {:.5})", est.mean, est.std_error)
    })?;
    Ok(format!(
        "mean {:.5} +- {:.5} over 1e5 samples",
        est.mean, est.std_error
    ))
}

fn logarithmic_rounds() -> Outcome {
    let n = 1u64 << 17;
    let limit = 10 + 3 * 17;
    let mut worst = 0;
    for seed in 0..20u64 {
        let path = gen_path(n, PathNumbering::Shuffled(seed)).map_err(|e| e.to_string())?;
        let cfg = EngineConfig::new(OrderingFamily::Affine, Variant::Fast, seed);
        let (labels, trace) = run_fast(&path, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(labels.component_count() == 1, || {
            format!("seed {seed}: split path")
        })?;
        worst = worst.max(trace.round_count());
    }
    ensure(worst <= limit, || format!("{worst} rounds > {limit}"))?;
    Ok(format!(
        "20 seeds on 2^17 vertices, at most {worst} rounds (limit {limit})"
    ))
}

fn space_bound(runs: &ZooRuns) -> Outcome {
    ensure(runs.space_failures.is_empty(), || {
        format!("{:?}", runs.space_failures)
    })?;
    Ok(format!(
        "peak live rows at most {:.2}x input; lean vertex tables within |V|",
        runs.worst_space_ratio
    ))
}

fn variant_equivalence(runs: &ZooRuns) -> Outcome {
    ensure(runs.variant_failures.is_empty(), || {
        format!("{:?}", runs.variant_failures)
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut points = 0;
    while points < 10_000 {
        let rounds = rng.gen_range(1..=12);
        let keys: Vec<AffineKey> = (0..rounds).map(|r| sample_key(rng.gen(), r)).collect();
        let acc = fold_accumulators(&keys);
        for (i, a) in acc.iter().enumerate() {
            let x: u64 = rng.gen();
            let want = keys[i + 1..].iter().fold(x, |y, k| k.apply(y));
            let got = axb(a.a(), Gf64(x), a.b()).map_err(|e| e.to_string())?.0;
            ensure(got == want, || {
                format!("round {i} of {rounds}: {got:#x} != {want:#x}")
            })?;
            points += 1;
        }
    }
    Ok(format!(
        "lean == fast on 300 zoo runs; {points} fold points agree"
    ))
}

fn field_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..1_000_000 {
        let (a, b) = (Gf64(rng.gen()), Gf64(rng.gen()));
        ensure(gf_mul(a, b) == gf_mul_reference(a, b), || {
            format!("{a:?} * {b:?}")
        })?;
    }
    for i in 0..100_000u64 {
        let key = sample_key(rng.gen(), i);
        let x: u64 = rng.gen();
        let y = key.apply(x);
        ensure(invert_key(&key).apply(y) == x, || {
            format!("{key:?} at {x:#x}")
        })?;
    }
    Ok("1e6 products match the bit-serial reference; 1e5 inversions round-trip".into())
}

fn sql_goldens() -> Outcome {
    let lean = emit_sql(&SqlOptions::new(Variant::Lean, FieldMode::Gf64Udf, "G"));
    let fast = emit_sql(&SqlOptions::new(Variant::Fast, FieldMode::Gf64Udf, "G"));
    ensure(lean == include_str!("golden/lean_gf64.sql"), || {
        "lean differs from golden".into()
    })?;
    ensure(fast == include_str!("golden/fast_gf64.sql"), || {
        "fast differs from golden".into()
    })?;
    let skeleton = [
        "select v, least(axb(A, v, B), min(axb(A, w, B))) as r",
        "from E group by v;",
        "select distinct V.r as v, W.r as w",
        "where E.v = V.v and E.w = W.v and V.r != W.r;",
        "select L.v as v, coalesce(R.r, axb(A, L.r, B)) as r",
    ];
    for clause in skeleton {
        ensure(lean.contains(clause) && fast.contains(clause), || {
            format!("missing `{clause}`")
        })?;
    }
    ensure(
        lean.contains("from L left outer join R on (L.r = R.v);"),
        || "lean join".into(),
    )?;
    ensure(fast.contains("(A,B) <- (A*alpha, A*beta+B)"), || {
        "fast key fold".into()
    })?;
    Ok("lean and fast byte-equal to goldens with the full clause skeleton".into())
}

fn report(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let took = start.elapsed();
    let (status, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    let slow = if took > budget {
        " [over time budget]"
    } else {
        ""
    };
    println!(
        "criterion {id:>2} {status}: {title}: {detail} ({:.2}s){slow}",
        took.as_secs_f64()
    );
    outcome.is_ok()
}

fn main() {
    // `cargo test` passes harness flags such as `--list`; there is nothing to filter.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let s = Duration::from_secs;
    let graphs = zoo();
    let mut runs = None;
    let mut ok = Vec::new();
    ok.push(report(1, "ten-vertex example golden", s(1), fig1_golden));
    ok.push(report(2, "oracle equivalence", s(300), || {
        let r = sweep_zoo(&graphs);
        let o = oracle_equivalence(&r);
        runs = Some(r);
        o
    }));
    let runs = runs.expect("sweep ran");
    ok.push(report(3, "MinId worst case", s(10), worst_case_paths));
    ok.push(report(4, "affine contraction factor", s(120), || {
        affine_gamma(&graphs)
    }));
    ok.push(report(5, "2n/3 bound", s(60), tight_bound));
    ok.push(report(6, "type-1 <= type-0 lemma", s(120), lemma_one));
    ok.push(report(7, "pendant-cycle constant", s(60), fig11_constant));
    ok.push(report(8, "logarithmic rounds", s(120), logarithmic_rounds));
    ok.push(report(9, "space bound", s(1), || space_bound(&runs)));
    ok.push(report(10, "variant equivalence", s(60), || {
        variant_equivalence(&runs)
    }));
    ok.push(report(11, "field correctness", s(30), field_correctness));
    ok.push(report(12, "SQL goldens", s(1), sql_goldens));
    let passed = ok.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", ok.len());
    if passed != ok.len() {
        std::process::exit(1);
    }
}
