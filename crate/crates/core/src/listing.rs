//! Triangle listing driven by a weak regularity partition of `V2 ∪ V3`.
//!
//! Every piece pair `(U_i ⊆ V2, U_j ⊆ V3)` defines a sub-instance
//! `(V1, U_i, U_j)`; the pairs partition `V1 × V2 × V3`, so each triangle is
//! found in exactly one of them. Each sub-instance is listed by whichever
//! pivot of the sparse lister has the smaller cost estimate.

use crate::bits::and_count;
use crate::bits::BitSet;
use crate::budget::TableBudget;
use crate::error::Result;
use crate::graph::KPartiteGraph;
use crate::regularity::{
    weak_regular_partition, Density, PseudoregularPartition, RegularityConfig,
};
use crate::triangle::{
    list_sparse_into, list_sparse_pivoted_into, SparseFRParams, DEFAULT_MAX_INDEX_BITS,
};
use crate::witness::{Collector, ListingResult};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;

/// Partition attempts before settling for an unverified partition.
const PARTITION_ATTEMPTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListingConfig {
    pub regularity: RegularityConfig,
    pub max_index_bits: u32,
    pub budget: TableBudget,
}

impl ListingConfig {
    pub fn for_graph(g: &KPartiteGraph, seed: u64) -> Self {
        ListingConfig {
            regularity: RegularityConfig::for_graph(g, seed),
            max_index_bits: DEFAULT_MAX_INDEX_BITS,
            budget: TableBudget::default(),
        }
    }

    pub fn with_regularity(regularity: RegularityConfig) -> Self {
        ListingConfig {
            regularity,
            max_index_bits: DEFAULT_MAX_INDEX_BITS,
            budget: TableBudget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Chunk `N(v)` for every `v ∈ V1`; cost `Σ_v d_2i(v) d_3j(v) / (log n)²`.
    PivotV1,
    /// Chunk `N(v)` for every `v ∈ U_i`; cost `|V1| e(U_i, U_j) / (log n)²`.
    PivotV2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPlan {
    /// Piece indices into the partition.
    pub pair: (usize, usize),
    pub sizes: (usize, usize),
    pub density: Density,
    pub strategy: Strategy,
    pub vertex_cost: f64,
    pub edge_cost: f64,
    pub estimated_cost: f64,
    /// `δ_ij ≤ √ε`.
    pub low_density: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityListing {
    pub result: ListingResult,
    /// Per-pair diagnostics; filled by [`list_triangles`] only.
    pub plans: Vec<PairPlan>,
    pub sub_instances: usize,
    pub unverified_partitions: usize,
}

fn log_sq(g: &KPartiteGraph) -> f64 {
    let l = (g.n().max(2) as f64).log2();
    l * l
}

/// Plans one piece pair from exact degree and edge counts.
pub fn plan_pair(g: &KPartiteGraph, p: &PseudoregularPartition, i: usize, j: usize) -> PairPlan {
    let (ui, uj) = (&p.pieces[i], &p.pieces[j]);
    let mi = BitSet::from_indices(g.n(), ui.iter().copied());
    let mj = BitSet::from_indices(g.n(), uj.iter().copied());
    let degree_sum: u128 = g
        .part_range(0)
        .map(|v| and_count(g.row(v), mi.words()) as u128 * and_count(g.row(v), mj.words()) as u128)
        .sum();
    let density = p.densities[i][j];
    let l2 = log_sq(g);
    let vertex_cost = degree_sum as f64 / l2;
    let edge_cost = g.part_size(0) as f64 * density.edges as f64 / l2;
    let strategy = if vertex_cost <= edge_cost {
        Strategy::PivotV1
    } else {
        Strategy::PivotV2
    };
    PairPlan {
        pair: (i, j),
        sizes: (ui.len(), uj.len()),
        density,
        strategy,
        vertex_cost,
        edge_cost,
        estimated_cost: vertex_cost.min(edge_cost),
        low_density: density.value() <= p.epsilon.sqrt(),
    }
}

fn partition(g: &KPartiteGraph, cfg: &RegularityConfig) -> Result<PseudoregularPartition> {
    let mut last = None;
    for attempt in 0..PARTITION_ATTEMPTS {
        let mut c = *cfg;
        c.rng_seed = cfg
            .rng_seed
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(attempt as u64));
        let p = weak_regular_partition(g, [1, 2], &c)?;
        if p.verified {
            return Ok(p);
        }
        last = Some(p);
    }
    Ok(last.expect("at least one attempt"))
}

struct Pass {
    plans: Vec<PairPlan>,
    verified: bool,
}

/// Lists the triangles of `g` into `out`, mapping ids through `origin`.
fn list_into(
    g: &KPartiteGraph,
    cfg: &ListingConfig,
    origin: &dyn Fn(usize) -> usize,
    out: &mut Collector,
) -> Result<Pass> {
    crate::triangle::require_three_parts(g)?;
    if g.part_sizes().contains(&0) || g.edge_count() == 0 {
        return Ok(Pass {
            plans: Vec::new(),
            verified: true,
        });
    }
    let p = partition(g, &cfg.regularity)?;
    let mut plans = Vec::new();
    let mut stopped = false;
    for i in p.pieces_on(1) {
        for j in p.pieces_on(2) {
            let plan = plan_pair(g, &p, i, j);
            let run = !stopped && plan.density.edges > 0;
            if run {
                let sub = g.induced_by_parts(&[
                    g.part_range(0).collect(),
                    p.pieces[i].clone(),
                    p.pieces[j].clone(),
                ])?;
                let map = |v: usize| origin(sub.origin[v]);
                let mut sink = |[a, b, c]: [usize; 3]| out.push(&[map(a), map(b), map(c)]);
                let flow = match plan.strategy {
                    Strategy::PivotV1 => {
                        let params =
                            SparseFRParams::for_graph(&sub.graph, cfg.max_index_bits, cfg.budget);
                        list_sparse_into(&sub.graph, &params, &mut sink)?
                    }
                    Strategy::PivotV2 => {
                        let params =
                            SparseFRParams::for_pivoted(&sub.graph, cfg.max_index_bits, cfg.budget);
                        list_sparse_pivoted_into(&sub.graph, &params, &mut sink)?
                    }
                };
                stopped = flow == ControlFlow::Break(());
            }
            plans.push(plan);
        }
    }
    Ok(Pass {
        plans,
        verified: p.verified,
    })
}

/// Lists up to `t` triangles (all when `None`) through one partition of
/// `G[V2 ∪ V3]`.
pub fn list_triangles(
    g: &KPartiteGraph,
    t: Option<usize>,
    cfg: &ListingConfig,
) -> Result<RegularityListing> {
    let mut out = Collector::new(t);
    let pass = list_into(g, cfg, &|v| v, &mut out)?;
    Ok(RegularityListing {
        result: out.finish(),
        plans: pass.plans,
        sub_instances: 1,
        unverified_partitions: usize::from(!pass.verified),
    })
}

fn split(range: std::ops::Range<usize>, blocks: usize) -> Vec<Vec<usize>> {
    let size = range.len().div_ceil(blocks).max(1);
    let v: Vec<usize> = range.collect();
    v.chunks(size).map(<[usize]>::to_vec).collect()
}

/// Cuts every part into `⌈√m⌉` blocks (`m` the largest part) and lists each
/// block triple separately, sharing one `t` cutoff.
pub fn list_triangles_threshold(
    g: &KPartiteGraph,
    t: Option<usize>,
    cfg: &ListingConfig,
) -> Result<RegularityListing> {
    crate::triangle::require_three_parts(g)?;
    let m = g.part_sizes().iter().copied().max().unwrap_or(0);
    let blocks = (m as f64).sqrt().ceil().max(1.0) as usize;
    let parts: Vec<Vec<Vec<usize>>> = (0..3).map(|i| split(g.part_range(i), blocks)).collect();
    let mut out = Collector::new(t);
    let (mut subs, mut unverified) = (0, 0);
    'outer: for a in &parts[0] {
        for b in &parts[1] {
            for c in &parts[2] {
                if out.is_done() {
                    break 'outer;
                }
                let sub = g.induced_by_parts(&[a.clone(), b.clone(), c.clone()])?;
                let mut local = *cfg;
                local.regularity = RegularityConfig {
                    rng_seed: cfg.regularity.rng_seed.wrapping_add(subs as u64),
                    ..cfg.regularity
                };
                let pass = list_into(&sub.graph, &local, &|v| sub.origin[v], &mut out)?;
                subs += 1;
                unverified += usize::from(!pass.verified);
            }
        }
    }
    Ok(RegularityListing {
        result: out.finish(),
        plans: Vec::new(),
        sub_instances: subs,
        unverified_partitions: unverified,
    })
}

/// Every triangle: rerun the threshold lister with `t` doubled until it is
/// no longer truncated, starting from `⌊|V1||V2||V3| / (log2 n)^2.25⌋`.
pub fn list_all_triangles(g: &KPartiteGraph, cfg: &ListingConfig) -> Result<RegularityListing> {
    crate::triangle::require_three_parts(g)?;
    let cube: f64 = g.part_sizes().iter().map(|&s| s as f64).product();
    let logn = (g.n().max(2) as f64).log2();
    let mut t = ((cube / logn.powf(2.25)).floor() as usize).max(1);
    let (mut subs, mut unverified) = (0, 0);
    loop {
        let mut r = list_triangles_threshold(g, Some(t), cfg)?;
        subs += r.sub_instances;
        unverified += r.unverified_partitions;
        if !r.result.truncated {
            r.result.requested_t = None;
            r.sub_instances = subs;
            r.unverified_partitions = unverified;
            return Ok(r);
        }
        t = t.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_triangles;

    #[test]
    fn complete_graph_counts() {
        let g = KPartiteGraph::complete(vec![3, 3, 3]);
        let cfg = ListingConfig::for_graph(&g, 1);
        assert_eq!(list_all_triangles(&g, &cfg).unwrap().result.len(), 27);
        let g8 = KPartiteGraph::complete(vec![8, 8, 8]);
        let cfg = ListingConfig::for_graph(&g8, 1);
        let r = list_triangles_threshold(&g8, Some(100), &cfg)
            .unwrap()
            .result;
        assert_eq!(r.len(), 100);
        assert!(r.truncated);
        assert_eq!(r.duplicate_emissions, 0);
    }

    #[test]
    fn zero_threshold() {
        let g = KPartiteGraph::complete(vec![2, 2, 2]);
        let cfg = ListingConfig::for_graph(&g, 1);
        let r = list_triangles_threshold(&g, Some(0), &cfg).unwrap().result;
        assert!(r.is_empty() && r.truncated);
        let e = KPartiteGraph::edgeless(vec![2, 2, 2]);
        let r = list_triangles_threshold(&e, Some(0), &cfg).unwrap().result;
        assert!(r.is_empty() && !r.truncated);
    }

    #[test]
    fn plans_pick_the_cheaper_pivot() {
        let g = KPartiteGraph::from_edges(
            vec![4, 4, 4],
            [
                (0, 4),
                (0, 8),
                (4, 8),
                (1, 5),
                (2, 5),
                (3, 5),
                (1, 9),
                (2, 9),
                (3, 9),
            ],
        )
        .unwrap();
        let cfg = ListingConfig::for_graph(&g, 2);
        let r = list_triangles(&g, None, &cfg).unwrap();
        assert_eq!(r.result.witnesses, brute_triangles(&g).unwrap().witnesses);
        for plan in &r.plans {
            assert_eq!(plan.estimated_cost, plan.vertex_cost.min(plan.edge_cost));
        }
    }
}
