use clap::{Args, Parser, Subcommand, ValueEnum};
use cliquelab::budget::TableBudget;
use cliquelab::hyperclique::{
    choose_block_size, detect_hyperclique_with, list_hypercliques_with, DEFAULT_MAX_TABLE_BITS,
};
use cliquelab::kclique::{find_witness, CostProfile, KCliqueDetector, ParamPolicy};
use cliquelab::listing::{list_triangles, list_triangles_threshold, ListingConfig};
use cliquelab::regularity::{
    check_pseudoregular_sampled, weak_regular_partition, RegularityConfig,
};
use cliquelab::triangle::{
    detect_naive, detect_scalar_reference, list_sparse_four_russians, list_sparse_pivoted,
    FourRussiansDetector, NaiveDetector, SparseFRParams, TriangleDetector, DEFAULT_MAX_INDEX_BITS,
};
use cliquelab::workbench::bench::{run_bench, BenchConfig};
use cliquelab::workbench::verify::{default_engines, verify, CorpusSpec, Task};
use cliquelab::workbench::{generate, read_instance, write_instance, GenKind, GenSpec, Instance};
use cliquelab::{Error, KPartiteGraph, UniformHypergraph};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cliquelab",
    version,
    about = "Triangle, k-clique and hyperclique workbench"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance file.
    Gen(GenArgs),
    DetectTriangle(DetectTriangleArgs),
    ListTriangles(ListTrianglesArgs),
    DetectClique(DetectCliqueArgs),
    DetectHyperclique(HypercliqueArgs),
    ListHypercliques(HypercliqueArgs),
    /// Pseudoregular partition of V2 ∪ V3 with a sampled check.
    Regularity(RegularityArgs),
    /// Run engines against the brute-force oracles on a random corpus.
    Verify(VerifyArgs),
    /// Time the triangle detectors.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "gnp-kpartite")]
    kind: GenKind,
    #[arg(long, short = 'n')]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    plants: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write here instead of stdout.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TriangleAlgo {
    Naive,
    Fr,
    Scalar,
}

#[derive(Args)]
struct DetectTriangleArgs {
    #[arg(long, value_enum, default_value = "naive")]
    algo: TriangleAlgo,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    json: bool,
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListAlgo {
    SparseFr,
    SparseFrPivot,
    Regularity,
    RegularityThreshold,
}

#[derive(Args)]
struct ListTrianglesArgs {
    #[arg(long, value_enum, default_value = "sparse-fr")]
    algo: ListAlgo,
    /// Stop after this many triangles.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Literal parameter formulas, clamped to the table guards.
    #[arg(long = "paper-params")]
    formula_params: bool,
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Naive,
    Fr,
}

#[derive(Args)]
struct DetectCliqueArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "naive")]
    base: Base,
    /// Per-level formulas for α and D (the default).
    #[arg(long = "paper-params", conflicts_with_all = ["alpha", "depth"])]
    formula_params: bool,
    #[arg(long, requires = "depth")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    depth: Option<usize>,
    /// Write the recursion trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also extract a clique by halving.
    #[arg(long)]
    witness: bool,
    /// Run split children on the thread pool (no trace).
    #[arg(long, conflicts_with = "trace")]
    parallel: bool,
    file: PathBuf,
}

#[derive(Args)]
struct HypercliqueArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_TABLE_BITS)]
    max_table_bits: u32,
    /// Block side; chosen from n when omitted.
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    json: bool,
    file: PathBuf,
}

#[derive(Args)]
struct RegularityArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Triangles,
    Kclique,
    Hyperclique,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "triangles")]
    task: TaskArg,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 100)]
    random: usize,
    #[arg(long, default_value_t = 20)]
    planted: usize,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long)]
    parallel_verify: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "scalar,naive,four-russians"
    )]
    engines: Vec<String>,
    #[arg(long, default_value = "scalar")]
    baseline: String,
    #[arg(long, default_value = "triangle-free-dense")]
    kind: GenKind,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    verify_cutoff: usize,
    #[arg(long, default_value_t = 2048)]
    scalar_max_n: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Mismatch(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn load_graph(path: &Path) -> Result<KPartiteGraph, Error> {
    match read_instance(path)? {
        Instance::Graph(g) => Ok(g),
        Instance::Hypergraph(_) => Err(Error::InvalidParameter(format!(
            "{} holds a hypergraph, expected a graph",
            path.display()
        ))),
    }
}

/// Graph files are accepted as 2-uniform hypergraphs.
fn load_hypergraph(path: &Path) -> Result<UniformHypergraph, Error> {
    Ok(match read_instance(path)? {
        Instance::Graph(g) => UniformHypergraph::from_graph(&g),
        Instance::Hypergraph(h) => h,
    })
}

/// Writes bulk output; a closed pipe (`| head`) just ends it.
fn emit(write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Error> {
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    match write(&mut out).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let spec = GenSpec {
        kind: a.kind,
        n_per_part: a.n,
        k: a.k,
        r: a.r,
        p: a.p,
        plant_count: a.plants,
        seed: a.seed,
    };
    let text = write_instance(&generate(&spec)?);
    match a.out {
        Some(p) => std::fs::write(p, text).map_err(Error::from)?,
        None => emit(|out| out.write_all(text.as_bytes()))?,
    }
    Ok(())
}

fn cmd_detect_triangle(a: DetectTriangleArgs, budget: TableBudget) -> CmdResult {
    let g = load_graph(&a.file)?;
    let found = match a.algo {
        TriangleAlgo::Naive => detect_naive(&g)?,
        TriangleAlgo::Scalar => detect_scalar_reference(&g)?,
        TriangleAlgo::Fr => FourRussiansDetector {
            block_size: a.block_size,
            budget,
            ..Default::default()
        }
        .detect(&g)?,
    };
    if a.json {
        print_json(&json!({ "found": found.is_some(), "witness": found }))?;
    } else {
        match found {
            Some([x, y, z]) => println!("triangle {x} {y} {z}"),
            None => println!("none"),
        }
    }
    Ok(())
}

fn print_listing(
    result: &cliquelab::ListingResult,
    extra: serde_json::Value,
    as_json: bool,
) -> Result<(), Error> {
    if as_json {
        let mut v = serde_json::to_value(result)?;
        if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
            obj.extend(more);
        }
        print_json(&v)
    } else {
        emit(|out| {
            for w in &result.witnesses {
                let ids: Vec<String> = w.iter().map(ToString::to_string).collect();
                writeln!(out, "{}", ids.join(" "))?;
            }
            Ok(())
        })?;
        eprintln!(
            "{} listed{}",
            result.len(),
            if result.truncated { " (truncated)" } else { "" }
        );
        Ok(())
    }
}

fn cmd_list_triangles(a: ListTrianglesArgs, budget: TableBudget) -> CmdResult {
    let g = load_graph(&a.file)?;
    if g.k() != 3 {
        return Err(Error::InvalidParameter(format!(
            "expected a tripartite graph, got {} parts",
            g.k()
        ))
        .into());
    }
    let sizes = [g.part_size(0), g.part_size(1), g.part_size(2)];
    let (result, extra) = match a.algo {
        ListAlgo::SparseFr | ListAlgo::SparseFrPivot => {
            let pivot = matches!(a.algo, ListAlgo::SparseFrPivot);
            let p = match (a.formula_params, pivot) {
                (true, false) => {
                    SparseFRParams::formula_for_sizes(sizes, DEFAULT_MAX_INDEX_BITS, budget)
                }
                (true, true) => SparseFRParams::formula_for_sizes(
                    [sizes[1], sizes[0], sizes[2]],
                    DEFAULT_MAX_INDEX_BITS,
                    budget,
                ),
                (false, false) => SparseFRParams::for_graph(&g, DEFAULT_MAX_INDEX_BITS, budget),
                (false, true) => SparseFRParams::for_pivoted(&g, DEFAULT_MAX_INDEX_BITS, budget),
            };
            let r = if pivot {
                list_sparse_pivoted(&g, a.t, &p)?
            } else {
                list_sparse_four_russians(&g, a.t, &p)?
            };
            (r, json!({ "params": p }))
        }
        ListAlgo::Regularity | ListAlgo::RegularityThreshold => {
            let mut cfg = ListingConfig::for_graph(&g, a.seed);
            cfg.budget = budget;
            if let Some(eps) = a.epsilon {
                cfg.regularity = RegularityConfig::new(eps, g.n(), a.seed)?;
            }
            let r = if matches!(a.algo, ListAlgo::Regularity) {
                list_triangles(&g, a.t, &cfg)?
            } else {
                list_triangles_threshold(&g, a.t, &cfg)?
            };
            let extra = json!({
                "plans": r.plans,
                "sub_instances": r.sub_instances,
                "unverified_partitions": r.unverified_partitions,
            });
            (r.result, extra)
        }
    };
    print_listing(&result, extra, a.json)?;
    Ok(())
}

fn cmd_detect_clique(a: DetectCliqueArgs, budget: TableBudget) -> CmdResult {
    let g = load_graph(&a.file)?;
    if g.k() != a.k {
        return Err(
            Error::InvalidParameter(format!("file has {} parts, --k is {}", g.k(), a.k)).into(),
        );
    }
    let fr = FourRussiansDetector {
        budget,
        ..Default::default()
    };
    let (base, profile): (&dyn TriangleDetector, CostProfile) = match a.base {
        Base::Naive => (&NaiveDetector, CostProfile::NAIVE),
        Base::Fr => (&fr, CostProfile::FOUR_RUSSIANS),
    };
    let policy = match (a.alpha, a.depth) {
        (Some(alpha), Some(depth_cap)) => {
            cliquelab::kclique::RecursionParams::new(depth_cap, alpha)?;
            ParamPolicy::Fixed { alpha, depth_cap }
        }
        _ => ParamPolicy::Formula(profile),
    };
    let mut det = KCliqueDetector::new(base, policy);
    det.parallel = a.parallel;
    let found = match &a.trace {
        Some(path) => {
            let (found, trace) = det.detect_traced(&g)?;
            std::fs::write(
                path,
                serde_json::to_string_pretty(&trace).map_err(Error::from)?,
            )
            .map_err(Error::from)?;
            found
        }
        None => det.detect(&g)?,
    };
    let witness = if a.witness && found {
        find_witness(&|h| det.detect(h), &g, a.k)?
    } else {
        None
    };
    print_json(&json!({ "found": found, "witness": witness, "policy": policy }))?;
    Ok(())
}

fn hyper_params(
    a: &HypercliqueArgs,
    h: &UniformHypergraph,
) -> Result<cliquelab::hyperclique::HypercliqueParams, Error> {
    match a.block_size {
        Some(s) => cliquelab::hyperclique::HypercliqueParams::with_block_size(
            a.k,
            h.r(),
            s,
            a.max_table_bits,
        ),
        None => choose_block_size(h.n(), a.k, h.r(), a.max_table_bits),
    }
}

fn cmd_detect_hyperclique(a: HypercliqueArgs, budget: TableBudget) -> CmdResult {
    let h = load_hypergraph(&a.file)?;
    let p = hyper_params(&a, &h)?;
    let found = detect_hyperclique_with(&h, &p, budget)?;
    if a.json {
        print_json(&json!({ "found": found, "params": p }))?;
    } else {
        println!("{}", if found { "found" } else { "none" });
    }
    Ok(())
}

fn cmd_list_hypercliques(a: HypercliqueArgs, budget: TableBudget) -> CmdResult {
    let h = load_hypergraph(&a.file)?;
    let p = hyper_params(&a, &h)?;
    let r = list_hypercliques_with(&h, a.t, &p, budget)?;
    print_listing(&r, json!({ "params": p }), a.json)?;
    Ok(())
}

fn cmd_regularity(a: RegularityArgs) -> CmdResult {
    let g = load_graph(&a.file)?;
    let mut cfg = match a.epsilon {
        Some(eps) => RegularityConfig::new(eps, g.n(), a.seed)?,
        None => RegularityConfig::for_graph(&g, a.seed),
    };
    if let Some(s) = a.samples {
        cfg.sample_count = s;
    }
    let p = weak_regular_partition(&g, [1, 2], &cfg)?;
    let check = check_pseudoregular_sampled(&g, &p, cfg.epsilon, cfg.sample_count, a.seed ^ 0x5eed);
    print_json(&json!({
        "pieces": p.pieces,
        "densities": p.densities.iter().map(|row| row.iter().map(|d| d.value()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "violations": check.violations,
        "max_error": check.max_error,
        "samples": check.samples,
        "verified": p.verified,
        "rounds": p.rounds,
    }))?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let task = match a.task {
        TaskArg::Triangles => Task::Triangles,
        TaskArg::Kclique => Task::KClique { k: a.k },
        TaskArg::Hyperclique => Task::Hyperclique { k: a.k, r: a.r },
    };
    let engines = default_engines(task);
    let mut specs = Vec::new();
    for &seed in &a.seeds {
        specs.extend(CorpusSpec::new(task, a.random, a.planted, a.max_n, seed).specs());
    }
    let report = verify(&engines, &specs, a.parallel_verify)?;
    if a.json {
        print_json(&report)?;
    } else {
        println!(
            "{} instances x {} engines ({})",
            report.instances,
            report.engines.len(),
            report.engines.join(", ")
        );
        for m in report.mismatches.iter().chain(&report.errors) {
            println!("FAIL {}: {}", m.engine, m.detail);
            println!(
                "  reproducer: {}",
                serde_json::to_string(&m.minimized).map_err(Error::from)?
            );
        }
    }
    if report.ok() {
        if !a.json {
            println!("all {} checks passed", report.checks);
        }
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "{} mismatches, {} engine errors",
            report.mismatches.len(),
            report.errors.len()
        )))
    }
}

fn cmd_bench(a: BenchArgs, budget: TableBudget) -> CmdResult {
    let cfg = BenchConfig {
        sizes: a.sizes,
        repeats: a.repeats,
        kind: a.kind,
        p: a.p,
        seed: a.seed,
        engines: a.engines,
        baseline: a.baseline,
        verify_cutoff: a.verify_cutoff,
        scalar_max_n: a.scalar_max_n,
        budget,
    };
    if cfg.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("--sizes must be ascending".into()).into());
    }
    let report = run_bench(&cfg)?;
    print!("{}", report.table());
    if let Some(path) = a.json {
        std::fs::write(
            path,
            serde_json::to_string_pretty(&report).map_err(Error::from)?,
        )
        .map_err(Error::from)?;
    }
    if report.has_mismatch() {
        return Err(Failure::Mismatch(
            "engines disagree on some decision".into(),
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = TableBudget::from_env()
        .map_err(Failure::from)
        .and_then(|budget| match cli.cmd {
            Cmd::Gen(a) => cmd_gen(a),
            Cmd::DetectTriangle(a) => cmd_detect_triangle(a, budget),
            Cmd::ListTriangles(a) => cmd_list_triangles(a, budget),
            Cmd::DetectClique(a) => cmd_detect_clique(a, budget),
            Cmd::DetectHyperclique(a) => cmd_detect_hyperclique(a, budget),
            Cmd::ListHypercliques(a) => cmd_list_hypercliques(a, budget),
            Cmd::Regularity(a) => cmd_regularity(a),
            Cmd::Verify(a) => cmd_verify(a),
            Cmd::Bench(a) => cmd_bench(a, budget),
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit { .. } => 3,
                Error::InternalInconsistency(_) => 1,
                _ => 2,
            })
        }
    }
}
