//! Every engine against the brute-force oracles on proptest-drawn instances.

use cliquelab::hyperclique::{
    detect_hyperclique, list_hypercliques, list_hypercliques_with, HypercliqueParams,
};
use cliquelab::kclique::{find_witness, kclique_via_k1, CostProfile, KCliqueDetector, ParamPolicy};
use cliquelab::listing::{
    list_all_triangles, list_triangles, list_triangles_threshold, ListingConfig,
};
use cliquelab::oracles::{brute_hypercliques, brute_kclique, brute_triangles};
use cliquelab::triangle::{
    detect_naive, detect_scalar_reference, list_sparse_four_russians, list_sparse_pivoted,
    FourRussiansDetector, NaiveDetector, SparseFRParams, TriangleDetector, DEFAULT_MAX_INDEX_BITS,
};
use cliquelab::workbench::gen::{gnp_hypergraph, gnp_kpartite};
use cliquelab::{KPartiteGraph, TableBudget};
use proptest::prelude::*;

fn graph(k: usize, max_n: usize) -> impl Strategy<Value = KPartiteGraph> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>())
        .prop_map(move |(n, p, seed)| gnp_kpartite(n, k, p, seed))
}

const FIXED: ParamPolicy = ParamPolicy::Fixed {
    alpha: 0.25,
    depth_cap: 3,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn triangle_detectors_find_real_triangles(g in graph(3, 20)) {
        let truth = brute_triangles(&g).unwrap();
        let set = truth.as_set();
        for w in [
            detect_naive(&g).unwrap(),
            detect_scalar_reference(&g).unwrap(),
            FourRussiansDetector::default().detect(&g).unwrap(),
        ] {
            match w {
                None => prop_assert!(truth.is_empty()),
                Some(t) => prop_assert!(set.contains(t.as_slice())),
            }
        }
    }

    #[test]
    fn listers_match_oracle(g in graph(3, 16), seed in any::<u64>()) {
        let truth = brute_triangles(&g).unwrap().witnesses;
        let p = SparseFRParams::for_graph(&g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
        prop_assert_eq!(&list_sparse_four_russians(&g, None, &p).unwrap().witnesses, &truth);
        let p = SparseFRParams::for_pivoted(&g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
        prop_assert_eq!(&list_sparse_pivoted(&g, None, &p).unwrap().witnesses, &truth);
        let cfg = ListingConfig::for_graph(&g, seed);
        prop_assert_eq!(&list_triangles(&g, None, &cfg).unwrap().result.witnesses, &truth);
        prop_assert_eq!(&list_triangles_threshold(&g, None, &cfg).unwrap().result.witnesses, &truth);
        prop_assert_eq!(&list_all_triangles(&g, &cfg).unwrap().result.witnesses, &truth);
    }

    #[test]
    fn bounded_listing_semantics(g in graph(3, 14), t in 0usize..30, seed in any::<u64>()) {
        let total = brute_triangles(&g).unwrap().len();
        let p = SparseFRParams::for_graph(&g, DEFAULT_MAX_INDEX_BITS, TableBudget::default());
        let cfg = ListingConfig::for_graph(&g, seed);
        for r in [
            list_sparse_four_russians(&g, Some(t), &p).unwrap(),
            list_triangles(&g, Some(t), &cfg).unwrap().result,
            list_triangles_threshold(&g, Some(t), &cfg).unwrap().result,
        ] {
            prop_assert_eq!(r.len(), t.min(total));
            prop_assert_eq!(r.truncated, total > t);
            prop_assert_eq!(r.duplicate_emissions, 0);
            prop_assert!(r.witnesses.iter().all(|w| g.has_edge(w[0], w[1]) && g.has_edge(w[0], w[2]) && g.has_edge(w[1], w[2])));
        }
    }

    #[test]
    fn kclique_matches_oracle(k in 4usize..=5, g0 in graph(4, 7), seed in any::<u64>(), p in 0.2..0.9f64) {
        let g = if k == 4 { g0 } else { gnp_kpartite(g0.part_size(0), 5, p, seed) };
        let truth = brute_kclique(&g, k).is_some();
        let fr = FourRussiansDetector::default();
        for base in [&NaiveDetector as &dyn TriangleDetector, &fr] {
            for policy in [FIXED, ParamPolicy::Formula(CostProfile::NAIVE)] {
                let mut det = KCliqueDetector::new(base, policy);
                prop_assert_eq!(det.detect(&g).unwrap(), truth);
                det.parallel = true;
                prop_assert_eq!(det.detect(&g).unwrap(), truth);
            }
        }
        let det = KCliqueDetector::new(&NaiveDetector, FIXED);
        let w = find_witness(&|h| det.detect(h), &g, k).unwrap();
        prop_assert_eq!(w.is_some(), truth);
        if let Some(w) = w {
            prop_assert!(w.iter().enumerate().all(|(a, &u)| w[a + 1..].iter().all(|&v| g.has_edge(u, v))));
        }
    }

    #[test]
    fn three_clique_delegates(g in graph(3, 12)) {
        let det = KCliqueDetector::new(&NaiveDetector, FIXED);
        prop_assert_eq!(det.detect(&g).unwrap(), detect_naive(&g).unwrap().is_some());
    }

    #[test]
    fn reduction_via_smaller_cliques(g in graph(4, 6)) {
        let solver = |h: &KPartiteGraph| Ok(brute_kclique(h, h.k()).is_some());
        prop_assert_eq!(kclique_via_k1(&g, 4, &solver).unwrap(), brute_kclique(&g, 4).is_some());
    }

    #[test]
    fn adding_edges_never_loses_a_clique(g in graph(4, 6), extra in proptest::collection::vec((0usize..24, 0usize..24), 1..10)) {
        let det = KCliqueDetector::new(&NaiveDetector, FIXED);
        let before = det.detect(&g).unwrap();
        let mut b = cliquelab::GraphBuilder::new(g.part_sizes().to_vec());
        for (u, v) in g.edges() {
            b.add_edge(u, v).unwrap();
        }
        for (u, v) in extra {
            let (u, v) = (u % g.n(), v % g.n());
            if g.part_of(u) != g.part_of(v) {
                b.add_edge(u, v).unwrap();
            }
        }
        let after = det.detect(&b.build()).unwrap();
        prop_assert!(!before || after);
    }

    #[test]
    fn hypercliques_match_oracle(
        (k, r) in prop_oneof![Just((4usize, 3usize)), Just((5, 3)), Just((5, 4)), Just((4, 2))],
        n in 1usize..=5,
        p in 0.3..1.0f64,
        seed in any::<u64>(),
        s in 1usize..=2,
        t in 1usize..10,
    ) {
        let h = gnp_hypergraph(n, k, r, p, seed).unwrap();
        let truth = brute_hypercliques(&h, k, None).unwrap();
        prop_assert_eq!(&list_hypercliques(&h, k, None).unwrap().witnesses, &truth.witnesses);
        prop_assert_eq!(detect_hyperclique(&h, k).unwrap(), !truth.is_empty());
        let params = HypercliqueParams::with_block_size(k, r, s, 22).unwrap();
        prop_assume!(params.l <= 22);
        let bounded = list_hypercliques_with(&h, Some(t), &params, TableBudget::default()).unwrap();
        prop_assert_eq!(bounded.len(), t.min(truth.len()));
        let all = truth.as_set();
        prop_assert!(bounded.witnesses.iter().all(|w| all.contains(w)));
    }
}
