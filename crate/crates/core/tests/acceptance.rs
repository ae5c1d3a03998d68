//! The eight acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Built with `harness = false` so the lines always reach stdout; the process
//! exits non-zero when any criterion fails.

use cliquelab::graph::GraphBuilder;
use cliquelab::hyperclique::{
    choose_block_size_log2, decode_compact, encode_compact, index_sets, list_hypercliques,
    real_block_size, HypercliqueParams,
};
use cliquelab::kclique::{
    detect_kclique, find_witness, CostProfile, KCliqueDetector, ParamPolicy, RecursionParams,
};
use cliquelab::listing::{list_triangles, list_triangles_threshold, ListingConfig};
use cliquelab::oracles::{brute_hypercliques, brute_kclique, brute_triangles};
use cliquelab::regularity::{
    check_pseudoregular_sampled, weak_regular_partition, PseudoregularPartition, RegularityConfig,
};
use cliquelab::triangle::{
    detect_four_russians, detect_naive, detect_scalar_reference, list_sparse_four_russians,
    BlockEdgeTable, FourRussiansDetector, NaiveDetector, SparseFRParams, TableMode,
    TriangleDetector, DEFAULT_MAX_INDEX_BITS,
};
use cliquelab::workbench::bench::median;
use cliquelab::workbench::gen::{
    gnp_hypergraph, gnp_kpartite, planted_clique, planted_hyperclique, triangle_free_dense,
};
use cliquelab::{KPartiteGraph, TableBudget, UniformHypergraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn is_clique(g: &KPartiteGraph, w: &[usize]) -> bool {
    w.len() == g.k()
        && w.iter().enumerate().all(|(i, &v)| g.part_of(v) == i)
        && w.iter()
            .enumerate()
            .all(|(a, &u)| w[a + 1..].iter().all(|&v| g.has_edge(u, v)))
}

fn is_hyperclique(h: &UniformHypergraph, w: &[usize]) -> bool {
    w.len() == h.k()
        && w.iter().enumerate().all(|(i, &v)| h.part_of(v) == i)
        && index_sets(h.k(), h.r()).iter().all(|set| {
            let e: Vec<usize> = set.iter().map(|&i| w[i]).collect();
            h.contains_sorted(&e)
        })
}

const PROBS: [f64; 5] = [0.05, 0.1, 0.3, 0.5, 0.9];

fn triangle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut mismatches = Vec::new();
    for i in 0..1000u64 {
        let n = rng.random_range(1..=40);
        let p = PROBS[i as usize % PROBS.len()];
        let g = gnp_kpartite(n, 3, p, 1000 + i);
        let truth = brute_triangles(&g).unwrap();
        let set = truth.as_set();
        let check_witness = |w: Option<[usize; 3]>| match w {
            None => truth.is_empty(),
            Some(t) => set.contains(t.as_slice()),
        };
        if !check_witness(detect_naive(&g).unwrap()) {
            mismatches.push(format!("naive #{i}"));
        }
        let b = cliquelab::triangle::default_block_size(
            &g,
            TableMode::Detect,
            DEFAULT_MAX_INDEX_BITS,
            TableBudget::default(),
        );
        let table = BlockEdgeTable::build(
            &g,
            b,
            TableMode::Detect,
            DEFAULT_MAX_INDEX_BITS,
            TableBudget::default(),
        )
        .unwrap();
        if !check_witness(detect_four_russians(&g, &table).unwrap()) {
            mismatches.push(format!("four-russians #{i}"));
        }
        let sp = SparseFRParams::for_graph(&g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
        let sparse = list_sparse_four_russians(&g, None, &sp).unwrap();
        if sparse.witnesses != truth.witnesses || sparse.duplicate_emissions != 0 {
            mismatches.push(format!("sparse-fr #{i}"));
        }
        let reg = list_triangles(&g, None, &ListingConfig::for_graph(&g, i)).unwrap();
        if reg.result.witnesses != truth.witnesses || reg.result.duplicate_emissions != 0 {
            mismatches.push(format!("regularity #{i}"));
        }
    }
    let took = start.elapsed();
    verdict(
        mismatches.is_empty() && took < Duration::from_secs(120),
        format!(
            "1000 instances, {} mismatches {:?}, {:.1}s (limit 120s)",
            mismatches.len(),
            &mismatches[..mismatches.len().min(5)],
            took.as_secs_f64()
        ),
    )
}

/// The forcing configuration: the per-level formulas put `D = 0` at these
/// sizes, so a fixed `α` and `D` is what exercises the recursion.
const CLAMPED: ParamPolicy = ParamPolicy::Fixed {
    alpha: 0.25,
    depth_cap: 3,
};

fn kclique_equivalence() -> Verdict {
    let start = Instant::now();
    let fr = FourRussiansDetector::default();
    let bases: [(&dyn TriangleDetector, CostProfile); 2] = [
        (&NaiveDetector, CostProfile::NAIVE),
        (&fr, CostProfile::FOUR_RUSSIANS),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let (mut mismatches, mut checked, mut present) = (Vec::new(), 0usize, 0usize);
    for k in [4usize, 5] {
        for i in 0..350u64 {
            let n = rng.random_range(1..=14);
            let g = if i < 300 {
                let p = [0.1, 0.2, 0.3, 0.5, 0.8][i as usize % 5];
                gnp_kpartite(n, k, p, 20_000 + 1000 * k as u64 + i)
            } else {
                planted_clique(n, k, 0.2, 1, 30_000 + 1000 * k as u64 + i).0
            };
            let truth = brute_kclique(&g, k).is_some();
            present += usize::from(truth);
            for (base, profile) in bases {
                for policy in [ParamPolicy::Formula(profile), CLAMPED] {
                    let det = KCliqueDetector::new(base, policy);
                    checked += 1;
                    if det.detect(&g).unwrap() != truth {
                        mismatches.push(format!("k={k} #{i} {} {policy:?}", base.name()));
                    }
                }
            }
            if let ParamPolicy::Fixed { alpha, depth_cap } = CLAMPED {
                let params = RecursionParams::new(depth_cap, alpha).unwrap();
                if detect_kclique(&g, k, &NaiveDetector, params).unwrap() != truth {
                    mismatches.push(format!("detect_kclique k={k} #{i}"));
                }
            }
            let det = KCliqueDetector::new(&NaiveDetector, CLAMPED);
            match find_witness(&|h| det.detect(h), &g, k).unwrap() {
                Some(w) if !is_clique(&g, &w) => mismatches.push(format!("bad witness k={k} #{i}")),
                None if truth => mismatches.push(format!("missing witness k={k} #{i}")),
                _ => {}
            }
        }
    }
    let took = start.elapsed();
    verdict(
        mismatches.is_empty() && took < Duration::from_secs(300),
        format!(
            "700 instances ({present} with a clique), {checked} detector runs, {} mismatches {:?}, {:.1}s (limit 300s)",
            mismatches.len(),
            &mismatches[..mismatches.len().min(5)],
            took.as_secs_f64()
        ),
    )
}

/// G(n, p) plus a few `V1` vertices adjacent to almost everything.
fn dense_vertex_instance(n: usize, k: usize, seed: u64) -> KPartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = gnp_kpartite(n, k, 0.3, seed);
    let mut b = GraphBuilder::new(base.part_sizes().to_vec());
    for (u, v) in base.edges() {
        b.add_edge(u, v).unwrap();
    }
    let dense = rng.random_range(1..=n.min(3));
    for u in 0..dense {
        for v in n..base.n() {
            if rng.random_bool(0.95) {
                b.add_edge(u, v).unwrap();
            }
        }
    }
    b.build()
}

fn shrinkage_invariant() -> Verdict {
    let (mut qualifying, mut tried, mut heavy_nodes, mut violations) = (0, 0, 0, Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    while qualifying < 100 && tried < 1000 {
        tried += 1;
        let k = [4, 5][tried % 2];
        let n = rng.random_range(4..=10);
        let g = dense_vertex_instance(n, k, 40_000 + tried as u64);
        let alpha = [0.25, 0.125, 0.4][tried % 3];
        let policy = ParamPolicy::Fixed {
            alpha,
            depth_cap: 3,
        };
        let (found, trace) = KCliqueDetector::new(&NaiveDetector, policy)
            .detect_traced(&g)
            .unwrap();
        if found != brute_kclique(&g, k).is_some() {
            violations.push(format!("decision #{tried}"));
        }
        let heavy: Vec<_> = trace.heavy_nodes().collect();
        if heavy.is_empty() {
            continue;
        }
        qualifying += 1;
        heavy_nodes += heavy.len();
        for node in &heavy {
            if !node.shrinkage_holds() {
                violations.push(format!("shrinkage #{tried} {:?}", node.part_sizes));
            }
        }
        if trace.nodes.iter().any(|nd| nd.depth > nd.depth_cap) {
            violations.push(format!("depth #{tried}"));
        }
    }
    verdict(
        qualifying == 100 && violations.is_empty(),
        format!(
            "{qualifying} instances with heavy-vertex splits ({tried} drawn), {heavy_nodes} heavy nodes, {} violations {:?}",
            violations.len(),
            &violations[..violations.len().min(5)]
        ),
    )
}

fn hyperclique_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA4);
    let mut mismatches = Vec::new();
    let mut total_witnesses = 0;
    for k in [4usize, 5] {
        for i in 0..250u64 {
            let n = rng.random_range(1..=12);
            let h = if i < 200 {
                let p = [0.3, 0.5, 0.7, 0.9][i as usize % 4];
                gnp_hypergraph(n, k, 3, p, 50_000 + 1000 * k as u64 + i).unwrap()
            } else {
                planted_hyperclique(n, k, 3, 0.3, 2, 60_000 + 1000 * k as u64 + i)
                    .unwrap()
                    .0
            };
            let truth = brute_hypercliques(&h, k, None).unwrap();
            total_witnesses += truth.len();
            let got = list_hypercliques(&h, k, None).unwrap();
            if got.as_set() != truth.as_set() || got.duplicate_emissions != 0 {
                mismatches.push(format!("k={k} #{i} unbounded"));
            }
            let t = rng.random_range(1..=truth.len() + 2);
            let bounded = list_hypercliques(&h, k, Some(t)).unwrap();
            let distinct: HashSet<_> = bounded.witnesses.iter().collect();
            if bounded.len() != t.min(truth.len())
                || distinct.len() != bounded.len()
                || !bounded.witnesses.iter().all(|w| is_hyperclique(&h, w))
            {
                mismatches.push(format!("k={k} #{i} t={t}"));
            }
        }
    }
    // r = 2 against the k-clique module
    for i in 0..100u64 {
        let n = rng.random_range(1..=8);
        let g = gnp_kpartite(n, 4, [0.4, 0.6, 0.8][i as usize % 3], 70_000 + i);
        let h = UniformHypergraph::from_graph(&g);
        let listed = list_hypercliques(&h, 4, None).unwrap();
        let decided = KCliqueDetector::new(&NaiveDetector, CLAMPED)
            .detect(&g)
            .unwrap();
        if decided != !listed.is_empty() || !listed.witnesses.iter().all(|w| is_clique(&g, w)) {
            mismatches.push(format!("r=2 #{i}"));
        }
    }
    let took = start.elapsed();
    verdict(
        mismatches.is_empty() && took < Duration::from_secs(300),
        format!(
            "500 r=3 instances ({total_witnesses} hypercliques) + 100 r=2 cross-checks, {} mismatches {:?}, {:.1}s (limit 300s)",
            mismatches.len(),
            &mismatches[..mismatches.len().min(5)],
            took.as_secs_f64()
        ),
    )
}

fn compact_representation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
    let mut failures = Vec::new();
    for i in 0..10_000 {
        let (k, r) = [(4, 3), (5, 3), (5, 4), (4, 2)][i % 4];
        let s = rng.random_range(1..=3);
        let params = HypercliqueParams::with_block_size(k, r, s, 64).unwrap();
        // parts of the (k-1)-partite hypergraph, some with a short last block
        let sizes: Vec<usize> = (0..k - 1).map(|_| rng.random_range(1..=3 * s)).collect();
        let j: Vec<usize> = sizes
            .iter()
            .map(|&m| rng.random_range(0..m.div_ceil(s)))
            .collect();
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect();
        let p = rng.random::<f64>();
        let mut edges = Vec::new();
        for set in index_sets(k - 1, r - 1) {
            let ranges: Vec<Vec<usize>> = set
                .iter()
                .map(|&q| {
                    let lo = j[q] * s;
                    (lo..(lo + s).min(sizes[q]))
                        .map(|x| offsets[q] + x)
                        .collect()
                })
                .collect();
            let mut tuple = vec![0; ranges.len()];
            let total: usize = ranges.iter().map(Vec::len).product();
            for mut code in 0..total {
                for (slot, rg) in tuple.iter_mut().zip(&ranges).rev() {
                    *slot = rg[code % rg.len()];
                    code /= rg.len();
                }
                if rng.random_bool(p) {
                    edges.push(tuple.clone());
                }
            }
        }
        let hsub = UniformHypergraph::new(r - 1, sizes.clone(), edges).unwrap();
        let rep = encode_compact(&hsub, &params, &j).unwrap();
        let back = decode_compact(&rep, &params, &sizes).unwrap();
        if back != hsub || rep.len != params.l {
            failures.push(format!("roundtrip #{i}"));
        }
    }
    let mut bound_checks = 0;
    let mut clamped_over = 0;
    for e in 10..=20 {
        let log_n = e as f64;
        for (k, r) in [(4, 3), (5, 3), (5, 4), (4, 2)] {
            let s = real_block_size(log_n, k, r).floor() as usize;
            let c = HypercliqueParams::with_block_size(k, r, 1, 64).unwrap().l;
            let l = c * s.pow(r as u32 - 1);
            bound_checks += 1;
            if l as f64 > 0.5 * log_n {
                failures.push(format!(
                    "L = {l} > log n / 2 at n = 2^{e}, (k, r) = ({k}, {r})"
                ));
            }
            let chosen = choose_block_size_log2(log_n, k, r, 64).unwrap();
            if s >= 1 && chosen.s != s {
                failures.push(format!("chosen s = {} != {s} at n = 2^{e}", chosen.s));
            }
            if s == 0 && chosen.l as f64 > 0.5 * log_n {
                clamped_over += 1;
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "10000 roundtrips, {bound_checks} L-bound checks, {} failures {:?}; {clamped_over} sizes where the formula gives s = 0 and s = 1 exceeds the bound",
            failures.len(),
            &failures[..failures.len().min(5)]
        ),
    )
}

fn pseudoregularity() -> Verdict {
    let start = Instant::now();
    let g = gnp_kpartite(512, 2, 0.5, 0xA6);
    let cfg = RegularityConfig::new(0.05, g.n(), 0xA6).unwrap();
    let p = weak_regular_partition(&g, [0, 1], &cfg).unwrap();
    let random = check_pseudoregular_sampled(&g, &p, 0.05, 10_000, 0xA6A6);

    let complete = KPartiteGraph::complete(vec![256, 256]);
    let trivial = PseudoregularPartition::trivial(&complete, [0, 1], 0.05).unwrap();
    let c = check_pseudoregular_sampled(&complete, &trivial, 0.05, 10_000, 1);

    // A–B and A'–B' complete, partition aligned to the halves
    let m = 128;
    let edges = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, 2 * m + b)))
        .chain((m..2 * m).flat_map(|a| (m..2 * m).map(move |b| (a, 2 * m + b))));
    let blocks = KPartiteGraph::from_edges(vec![2 * m, 2 * m], edges).unwrap();
    let aligned = PseudoregularPartition::with_pieces(
        &blocks,
        [0, 1],
        vec![
            (0..m).collect(),
            (m..2 * m).collect(),
            (2 * m..3 * m).collect(),
            (3 * m..4 * m).collect(),
        ],
        0.05,
    )
    .unwrap();
    let a = check_pseudoregular_sampled(&blocks, &aligned, 0.05, 10_000, 2);
    let took = start.elapsed();
    verdict(
        random.pass_fraction >= 0.99
            && c.pass_fraction == 1.0
            && a.pass_fraction == 1.0
            && took < Duration::from_secs(180),
        format!(
            "G(512,512,0.5): {} pieces, {:.2}% of 10000 pass (max error {:.4}); complete {:.0}%, two-block {:.0}%; {:.1}s (limit 180s)",
            p.piece_count(),
            100.0 * random.pass_fraction,
            random.max_error,
            100.0 * c.pass_fraction,
            100.0 * a.pass_fraction,
            took.as_secs_f64()
        ),
    )
}

fn listing_truncation() -> Verdict {
    let (g, plants) = planted_clique(128, 3, 0.0, 100, 0xA7);
    let total = brute_triangles(&g).unwrap().len();
    let cfg = ListingConfig::for_graph(&g, 0xA7);
    let mut problems = Vec::new();
    for (name, r) in [
        (
            "list_triangles",
            list_triangles(&g, Some(50), &cfg).unwrap(),
        ),
        (
            "list_triangles_threshold",
            list_triangles_threshold(&g, Some(50), &cfg).unwrap(),
        ),
    ] {
        let res = &r.result;
        let distinct: HashSet<_> = res.witnesses.iter().collect();
        if res.len() != 50
            || distinct.len() != 50
            || res.duplicate_emissions != 0
            || !res.truncated
            || !res.witnesses.iter().all(|w| is_clique(&g, w))
        {
            problems.push(format!(
                "{name}: {} listed, {} distinct, {} duplicates",
                res.len(),
                distinct.len(),
                res.duplicate_emissions
            ));
        }
    }
    verdict(
        problems.is_empty() && plants.len() == 100 && total == 100,
        format!(
            "{total} triangles in the instance, t = 50: {}",
            if problems.is_empty() {
                "both listers return 50 distinct valid triangles, 0 duplicates".to_string()
            } else {
                problems.join("; ")
            }
        ),
    )
}

fn time_median(repeats: usize, mut f: impl FnMut() -> bool) -> (f64, bool) {
    let mut times = Vec::with_capacity(repeats);
    let mut found = false;
    for _ in 0..repeats {
        let t0 = Instant::now();
        found = f();
        times.push(t0.elapsed().as_secs_f64());
    }
    (median(&times), found)
}

fn benchmark_sanity() -> Verdict {
    // density ½ with no triangle, so no engine can stop early
    let g = triangle_free_dense(2048, 0xA8);
    let (scalar, f1) = time_median(5, || detect_scalar_reference(&g).unwrap().is_some());
    let (naive, f2) = time_median(5, || detect_naive(&g).unwrap().is_some());
    let speedup = scalar / naive;
    println!("      n/part   naive ms   four-russians ms   fr/naive");
    for n in [512, 1024, 2048, 4096] {
        let g = triangle_free_dense(n, 0xA8);
        let (tn, _) = time_median(3, || detect_naive(&g).unwrap().is_some());
        let (tf, _) = time_median(3, || {
            FourRussiansDetector::default()
                .detect(&g)
                .unwrap()
                .is_some()
        });
        println!(
            "      {n:>6} {:>10.2} {:>18.2} {:>10.2}",
            tn * 1e3,
            tf * 1e3,
            tf / tn
        );
    }
    verdict(
        speedup >= 8.0 && !f1 && !f2,
        format!(
            "n = 2048/part, density {:.3}: scalar {:.1} ms, bit-parallel {:.2} ms, speedup {:.1}x (need 8x)",
            g.edge_count() as f64 / (3.0 * 2048.0 * 2048.0),
            scalar * 1e3,
            naive * 1e3,
            speedup
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("triangle oracle equivalence", triangle_equivalence),
        ("k-clique equivalence", kclique_equivalence),
        ("recursion shrinkage invariant", shrinkage_invariant),
        ("hyperclique equivalence", hyperclique_equivalence),
        ("compact representation", compact_representation),
        ("pseudoregularity", pseudoregularity),
        ("listing truncation / no duplicates", listing_truncation),
        ("benchmark sanity", benchmark_sanity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += usize::from(!v.pass);
        println!(
            "acceptance {} {}: {} -- {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail
        );
    }
    println!("acceptance: {} of 8 passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
