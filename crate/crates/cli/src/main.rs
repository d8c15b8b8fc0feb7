//! `randcc`: connected components by Randomised Contraction.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage error,
//! 3 runtime or capacity error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use randcc::baselines::union_find_components;
use randcc::bounds::{
    exact_expected_representatives, lemma1_check, monte_carlo_gamma, type_census, Digraph,
    GammaMethod, LemmaOutcome, MAX_EXHAUSTIVE_N,
};
use randcc::generators::{
    gen_directed_cycle, gen_random_digraph, Family, GeneratorSpec, PathNumbering, RMAT_DEFAULT,
};
use randcc::graph::{canonicalize, parse_labeling, partition_mismatch, write_labeling};
use randcc::sql::{emit_sql, FieldMode, SqlOptions, DEFAULT_PRIME};
use randcc::{parse_edge_list, run, EdgeTable, EngineConfig, Labeling, OrderingFamily, Variant};

const DEFAULT_SEED: &str = "1592598550";

#[derive(Debug)]
enum Failure {
    Mismatch(String),
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

fn runtime<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Runtime(format!("{context}: {e}"))
}

type CmdResult = Result<(), Failure>;

/// A fixed seed, or `random` for one drawn from the OS.
#[derive(Debug, Clone, Copy)]
struct Seed(u64);

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s == "random" {
        return Ok(Seed(rand::random()));
    }
    s.parse()
        .map(Seed)
        .map_err(|_| format!("expected an unsigned integer or `random`, got `{s}`"))
}

#[derive(Parser)]
#[command(
    name = "randcc",
    version,
    about = "Connected components by Randomised Contraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every vertex of an edge list with its component.
    Run(RunArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
    /// Check the engine against union-find or a labeling file.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of the single-round contraction factor.
    Stats(StatsArgs),
    /// Exact expectations over all labellings of small digraphs.
    Bounds(BoundsArgs),
    /// Print the SQL statement sequence for a database run.
    EmitSql(EmitSqlArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Minid,
    Random,
    Affine,
    Keyed,
}

impl From<MethodArg> for OrderingFamily {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Minid => OrderingFamily::MinId,
            MethodArg::Random => OrderingFamily::RandomKeys,
            MethodArg::Affine => OrderingFamily::Affine,
            MethodArg::Keyed => OrderingFamily::KeyedPermutation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Lean,
    Fast,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Lean => Variant::Lean,
            VariantArg::Fast => Variant::Fast,
        }
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Vertex ordering drawn each round.
    #[arg(long, value_enum, default_value = "affine")]
    method: MethodArg,
    /// Composition strategy; `fast` supports only minid and affine.
    #[arg(long, value_enum, default_value = "lean")]
    variant: VariantArg,
    /// Integer seed, or `random`.
    #[arg(long, value_parser = parse_seed, default_value = DEFAULT_SEED)]
    seed: Seed,
    /// Abort after this many rounds (default grows with log |V|).
    #[arg(long)]
    max_rounds: Option<usize>,
}

impl EngineArgs {
    fn config(&self) -> Result<EngineConfig, Failure> {
        let method = OrderingFamily::from(self.method);
        let variant = Variant::from(self.variant);
        if variant == Variant::Fast
            && !matches!(method, OrderingFamily::MinId | OrderingFamily::Affine)
        {
            return Err(Failure::Usage(format!(
                "--variant fast cannot be combined with --method {}",
                method.name()
            )));
        }
        let cfg = EngineConfig::new(method, variant, self.seed.0);
        match self.max_rounds {
            Some(0) => Err(Failure::Usage("--max-rounds must be at least 1".into())),
            Some(n) => Ok(cfg.with_max_rounds(n)),
            None => Ok(cfg),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Edge list, two IDs per line.
    #[arg(long)]
    input: PathBuf,
    /// Labeling output, `vertex<TAB>label` per line.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Label each component by its smallest vertex.
    #[arg(long)]
    canonical: bool,
    /// Per-round statistics as TSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    family: FamilyArg,
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_seed, default_value = DEFAULT_SEED)]
    seed: Seed,
    /// Randomly permute vertex IDs afterwards.
    #[arg(long, global = true)]
    shuffle: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum NumberingArg {
    Sequential,
    Optimal,
    Shuffled,
}

#[derive(Subcommand)]
enum FamilyArg {
    /// Path on n vertices.
    Path {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "sequential")]
        numbering: NumberingArg,
    },
    /// Disjoint sequentially numbered paths.
    PathUnion {
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<u64>,
    },
    /// Recursive-matrix power-law graph on 2^scale vertices.
    Rmat {
        #[arg(long)]
        scale: u32,
        #[arg(long)]
        edges: u64,
        /// Quadrant probabilities a,b,c,d.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        probs: Option<Vec<f64>>,
    },
    /// Grid of pixels, each neighbour edge kept with the given probability.
    Grid {
        #[arg(long)]
        width: u64,
        #[arg(long)]
        height: u64,
        #[arg(long, default_value_t = 0.5)]
        keep: f64,
    },
    /// Uniform random graph with n vertices and m edges.
    ErdosRenyi {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        edges: u64,
    },
    /// Directed cycle on n vertices, as an arc list.
    DirectedCycle {
        #[arg(long)]
        n: usize,
    },
    /// Five-cycle with three pendant vertices on each cycle vertex.
    Fig11,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgainstArg {
    Oracle,
    File,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reference partition: union-find, or a labeling file given by --labels.
    #[arg(long, value_enum, default_value = "oracle")]
    against: AgainstArg,
    /// Labeling file for `--against file`.
    #[arg(long, required_if_eq("against", "file"))]
    labels: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    Full,
    Affine,
    Keyed,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "affine")]
    method: GammaArg,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, value_parser = parse_seed, default_value = DEFAULT_SEED)]
    seed: Seed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphsArg {
    Random,
    Cycle,
    All,
}

#[derive(Args)]
struct BoundsArgs {
    /// Vertex count, at most 10.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "all")]
    graphs: GraphsArg,
    /// Number of random digraphs.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Arc probability of the random digraphs.
    #[arg(long, default_value_t = 0.3)]
    arc_probability: f64,
    #[arg(long, value_parser = parse_seed, default_value = DEFAULT_SEED)]
    seed: Seed,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Gf64Udf,
    PrimeModulus,
}

#[derive(Args)]
struct EmitSqlArgs {
    #[arg(long, value_enum, default_value = "lean")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "gf64-udf")]
    field: FieldArg,
    /// Prime for `--field prime-modulus`; must exceed every vertex ID.
    #[arg(long, default_value = DEFAULT_PRIME)]
    prime: String,
    /// Name of the input edge table.
    #[arg(long, default_value = "G")]
    table: String,
}

fn read_edges(path: &Path) -> Result<EdgeTable, Failure> {
    let file = File::open(path).map_err(runtime(&path.display().to_string()))?;
    parse_edge_list(BufReader::new(file)).map_err(runtime(&path.display().to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(runtime(&path.display().to_string()))
}

fn components(
    table: &EdgeTable,
    engine: &EngineArgs,
) -> Result<(Labeling, EngineConfig, randcc::ContractionTrace), Failure> {
    let cfg = engine.config()?;
    let (labeling, trace) = run(table, &cfg).map_err(runtime("contraction"))?;
    Ok((labeling, cfg, trace))
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let table = read_edges(&args.input)?;
    let (mut labeling, _, trace) = components(&table, &args.engine)?;
    if args.canonical {
        labeling = canonicalize(&labeling);
    }
    let mut out = create(&args.output)?;
    write_labeling(&labeling, &mut out)
        .and_then(|_| out.flush())
        .map_err(runtime("writing labeling"))?;
    if let Some(path) = &args.trace {
        trace
            .write_tsv(create(path)?)
            .map_err(runtime("writing trace"))?;
    }
    eprintln!(
        "{} vertices, {} components, {} rounds",
        labeling.len(),
        labeling.component_count(),
        trace.round_count()
    );
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    let seed = args.seed.0;
    let family = match args.family {
        FamilyArg::Path { n, numbering } => Family::Path {
            n,
            numbering: match numbering {
                NumberingArg::Sequential => PathNumbering::Sequential,
                NumberingArg::Optimal => PathNumbering::Optimal,
                NumberingArg::Shuffled => PathNumbering::Shuffled(seed),
            },
        },
        FamilyArg::PathUnion { lengths } => Family::PathUnion { lengths },
        FamilyArg::Rmat {
            scale,
            edges,
            probs,
        } => Family::Rmat {
            scale,
            edges,
            probs: probs.map_or(RMAT_DEFAULT, |p| [p[0], p[1], p[2], p[3]]),
        },
        FamilyArg::Grid {
            width,
            height,
            keep,
        } => Family::Grid {
            width,
            height,
            keep_probability: keep,
        },
        FamilyArg::ErdosRenyi { n, edges } => Family::ErdosRenyi { n, edges },
        FamilyArg::DirectedCycle { n } => Family::DirectedCycle { n },
        FamilyArg::Fig11 => Family::Fig11,
    };
    let mut spec = GeneratorSpec::new(family, seed);
    if args.shuffle {
        spec = spec.shuffled();
    }
    let table = spec.build().map_err(|e| Failure::Usage(e.to_string()))?;
    let written = match &args.out {
        Some(path) => {
            let mut out = create(path)?;
            table
                .write_to(&mut out)
                .and_then(|n| out.flush().map(|_| n))
        }
        None => table.write_to(io::stdout().lock()),
    }
    .map_err(runtime("writing edge list"))?;
    eprintln!("{written} edges");
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let table = read_edges(&args.input)?;
    let (got, cfg, trace) = components(&table, &args.engine)?;
    let (reference, name) = match args.against {
        AgainstArg::Oracle => (union_find_components(&table), "union-find".to_string()),
        AgainstArg::File => {
            let path = args.labels.as_deref().expect("required by clap");
            let file = File::open(path).map_err(runtime(&path.display().to_string()))?;
            let l = parse_labeling(BufReader::new(file))
                .map_err(runtime(&path.display().to_string()))?;
            (l, path.display().to_string())
        }
    };
    match partition_mismatch(&got, &reference) {
        Ok(None) => {
            println!(
                "ok: {} vertices, {} components, {} rounds ({} {}, seed {})",
                got.len(),
                got.component_count(),
                trace.round_count(),
                cfg.method.name(),
                cfg.variant.name(),
                cfg.seed
            );
            Ok(())
        }
        Ok(Some(m)) => {
            let (left, right) = if m.together_in_left {
                ("together", "apart")
            } else {
                ("apart", "together")
            };
            Err(Failure::Mismatch(format!(
                "mismatch: vertices {} and {} are {left} in the engine output but {right} in {name}",
                m.u, m.w
            )))
        }
        Err(e) => Err(Failure::Mismatch(format!("mismatch: {e}"))),
    }
}

fn cmd_stats(args: StatsArgs) -> CmdResult {
    let table = read_edges(&args.input)?;
    let method = match args.method {
        GammaArg::Full => GammaMethod::Full,
        GammaArg::Affine => GammaMethod::Affine,
        GammaArg::Keyed => GammaMethod::Keyed,
    };
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let est = monte_carlo_gamma(&table, method, args.samples, args.seed.0)
        .map_err(runtime("estimation"))?;
    est.write_tsv(io::stdout().lock())
        .map_err(runtime("stdout"))
}

struct BoundsSummary {
    graphs: usize,
    lemma_violations: usize,
    above_two_thirds: usize,
    census_failures: usize,
}

fn report_graph(
    out: &mut impl Write,
    label: &str,
    g: &Digraph,
    summary: &mut BoundsSummary,
) -> io::Result<()> {
    let n = g.vertex_count();
    let census = type_census(g).expect("size checked");
    let expected = exact_expected_representatives(g).expect("size checked");
    let total = &census.r0 + &census.r1 + &census.r2plus;
    let n_rat = BigRational::from_integer((n as i64).into());
    let census_ok = total == n_rat && census.expected_representatives() == expected;
    let per_n = &expected / &n_rat;
    let lemma = lemma1_check(g).expect("size checked");
    summary.graphs += 1;
    summary.census_failures += usize::from(!census_ok);
    if g.all_out_neighbourhoods_nonempty() && per_n > BigRational::new(2.into(), 3.into()) {
        summary.above_two_thirds += 1;
    }
    let lemma_text = match lemma {
        LemmaOutcome::Holds => "holds".to_string(),
        LemmaOutcome::Violated {
            vertex,
            type1,
            type0,
        } => {
            summary.lemma_violations += 1;
            format!("violated at vertex {vertex} ({type1} > {type0})")
        }
    };
    writeln!(
        out,
        "{label}\tn={n}\tarcs={}\texpectation {expected} (= {per_n}·n)\tR0+R1+R2plus = {total} {}\tlemma {lemma_text}",
        g.arcs().count(),
        if census_ok { "ok" } else { "FAILED" },
    )
}

fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    if args.n > MAX_EXHAUSTIVE_N {
        return Err(Failure::Usage(format!(
            "--n {} exceeds the exhaustive limit of {MAX_EXHAUSTIVE_N}",
            args.n
        )));
    }
    if args.n < 2 {
        return Err(Failure::Usage("--n must be at least 2".into()));
    }
    let mut out = io::stdout().lock();
    let mut summary = BoundsSummary {
        graphs: 0,
        lemma_violations: 0,
        above_two_thirds: 0,
        census_failures: 0,
    };
    if args.graphs != GraphsArg::Random {
        let g = gen_directed_cycle(args.n).map_err(|e| Failure::Usage(e.to_string()))?;
        report_graph(&mut out, "cycle", &g, &mut summary).map_err(runtime("stdout"))?;
    }
    if args.graphs != GraphsArg::Cycle {
        for i in 0..args.count {
            let g = gen_random_digraph(
                args.n,
                args.arc_probability,
                args.seed.0.wrapping_add(i as u64),
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            report_graph(&mut out, &format!("random-{i}"), &g, &mut summary)
                .map_err(runtime("stdout"))?;
        }
    }
    writeln!(
        out,
        "summary\tgraphs={}\tlemma_violations={}\tabove_2/3·n={}\tcensus_failures={}",
        summary.graphs, summary.lemma_violations, summary.above_two_thirds, summary.census_failures
    )
    .map_err(runtime("stdout"))?;
    if summary.census_failures > 0 {
        return Err(Failure::Runtime("type census does not sum to n".into()));
    }
    Ok(())
}

fn cmd_emit_sql(args: EmitSqlArgs) -> CmdResult {
    let field = match args.field {
        FieldArg::Gf64Udf => FieldMode::Gf64Udf,
        FieldArg::PrimeModulus => {
            if args.prime.is_empty() || !args.prime.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Failure::Usage(format!(
                    "--prime must be a decimal integer, got `{}`",
                    args.prime
                )));
            }
            FieldMode::PrimeModulus { prime: args.prime }
        }
    };
    let sql = emit_sql(&SqlOptions::new(args.variant.into(), field, args.table));
    let mut out = io::stdout().lock();
    out.write_all(sql.as_bytes())
        .and_then(|_| out.flush())
        .map_err(runtime("stdout"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::EmitSql(a) => cmd_emit_sql(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Mismatch(m) => eprintln!("{m}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Runtime(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
