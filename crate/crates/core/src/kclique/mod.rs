//! k-clique detection by divide and conquer down to a triangle detector.
//!
//! A node of the recursion either searches exhaustively (depth cap reached),
//! splits around a heavy `V1` vertex, or hands the instance to the block
//! reduction that solves it with `(k-1)`-clique calls. The `(k-1)` level
//! runs the same recursion, bottoming out at the pluggable triangle detector.

use crate::bits::BitSet;
use crate::error::{invalid, Error, Result};
use crate::graph::KPartiteGraph;
use crate::triangle::TriangleDetector;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const ALPHA_MIN: f64 = 1.0 / (1u64 << 20) as f64;
pub const ALPHA_MAX: f64 = 0.5;

/// Running time `n³ (log n)^a (log log n)^b` of a base triangle detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub a: f64,
    pub b: f64,
}

impl CostProfile {
    pub const ZERO: CostProfile = CostProfile { a: 0.0, b: 0.0 };
    /// One word operation handles `log n` vertices.
    pub const NAIVE: CostProfile = CostProfile { a: -1.0, b: 0.0 };
    pub const FOUR_RUSSIANS: CostProfile = CostProfile { a: -2.0, b: 0.0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionParams {
    /// `D`
    pub depth_cap: usize,
    /// `α`
    pub alpha: f64,
    /// `d`
    pub depth: usize,
}

impl RecursionParams {
    pub fn new(depth_cap: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha {alpha} not in (0, 1)"));
        }
        Ok(RecursionParams {
            depth_cap,
            alpha,
            depth: 0,
        })
    }
}

/// `D = ⌊log2 n / (4k)⌋` and the unclamped `α = log2((k − a) log2 n) / max(D, 1)`.
pub fn raw_params(n: usize, k: usize, profile: CostProfile) -> (usize, f64) {
    let log_n = (n.max(2) as f64).log2();
    let depth_cap = (log_n / (4.0 * k as f64)).floor().max(0.0) as usize;
    let alpha = ((k as f64 - profile.a) * log_n).log2() / depth_cap.max(1) as f64;
    (depth_cap, alpha)
}

/// [`raw_params`] with `α` clamped into `[2^-20, 1/2]`.
pub fn choose_params(n: usize, k: usize, profile: CostProfile) -> RecursionParams {
    let (depth_cap, alpha) = raw_params(n, k, profile);
    let alpha = if alpha.is_finite() {
        alpha.clamp(ALPHA_MIN, ALPHA_MAX)
    } else {
        ALPHA_MAX
    };
    RecursionParams {
        depth_cap,
        alpha,
        depth: 0,
    }
}

/// How each recursion level picks its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamPolicy {
    /// The same `α` and `D` at every level.
    Fixed { alpha: f64, depth_cap: usize },
    /// [`choose_params`] on every level's own `n` and `k`.
    Formula(CostProfile),
}

impl ParamPolicy {
    fn params(&self, g: &KPartiteGraph) -> RecursionParams {
        match *self {
            ParamPolicy::Fixed { alpha, depth_cap } => RecursionParams {
                depth_cap,
                alpha,
                depth: 0,
            },
            ParamPolicy::Formula(profile) => choose_params(g.n(), g.k(), profile),
        }
    }
}

/// `α` as an exact fraction `m / 2^e`.
fn dyadic(alpha: f64) -> (BigUint, u32) {
    let bits = alpha.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | 1 << 52, raw_exp - 1075)
    };
    if exp >= 0 {
        (BigUint::from(mantissa) << exp as u32, 0)
    } else {
        (BigUint::from(mantissa), (-exp) as u32)
    }
}

/// `x ≥ α · y`, exactly.
fn at_least_fraction(x: &BigUint, alpha: f64, y: &BigUint) -> bool {
    let (m, e) = dyadic(alpha);
    (x << e) >= m * y
}

/// `x ≤ (1 − α) · y`, exactly.
pub fn at_most_complement(x: &BigUint, alpha: f64, y: &BigUint) -> bool {
    let (m, e) = dyadic(alpha);
    let scale = BigUint::one() << e;
    if m > scale {
        return x.is_zero();
    }
    (x << e) <= (scale - m) * y
}

/// The `V1` vertex with the largest degree product among those reaching
/// `α · |V2| ⋯ |V_k|`; ties go to the lowest id.
pub fn find_heavy_vertex(g: &KPartiteGraph, alpha: f64) -> Option<usize> {
    if g.k() < 2 {
        return None;
    }
    let total = g.part_size_product(1);
    let mut best: Option<(BigUint, usize)> = None;
    for v in g.part_range(0) {
        let p = g.degree_product(v).expect("v is in the first part");
        if p.is_zero() || !at_least_fraction(&p, alpha, &total) {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| p > *b) {
            best = Some((p, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Lexicographically first cross-part clique of `g` by bitset backtracking.
pub fn exhaustive_kclique(g: &KPartiteGraph) -> Option<Vec<usize>> {
    if g.k() == 0 || g.part_sizes().contains(&0) {
        return None;
    }
    let mut chosen = Vec::with_capacity(g.k());
    let all = BitSet::from_range(g.n(), 0..g.n());
    fn go(g: &KPartiteGraph, cand: &BitSet, chosen: &mut Vec<usize>) -> bool {
        let part = chosen.len();
        if part == g.k() {
            return true;
        }
        let range = g.part_range(part);
        for v in crate::bits::ones_in(cand.words(), range) {
            let mut next = cand.clone();
            next.intersect_with(&BitSet::from_words(g.n(), g.row(v).to_vec()));
            // every later part must keep a candidate
            if (part + 1..g.k()).any(|p| next.count_in(g.part_range(p)) == 0) {
                continue;
            }
            chosen.push(v);
            if go(g, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(g, &all, &mut chosen).then_some(chosen)
}

fn neighbourhood_graph(g: &KPartiteGraph, v: usize) -> Result<crate::graph::Subgraph> {
    let parts: Vec<Vec<usize>> = (1..g.k()).map(|i| g.neighbors(v, i).collect()).collect();
    // induce with an empty first part, then drop it
    let mut full = vec![Vec::new()];
    full.extend(parts);
    let sub = g.induced_by_parts(&full)?;
    let sizes = sub.graph.part_sizes()[1..].to_vec();
    let edges: Vec<(usize, usize)> = sub.graph.edges().collect();
    let graph = KPartiteGraph::from_edges(sizes, edges)?;
    Ok(crate::graph::Subgraph {
        graph,
        origin: sub.origin,
    })
}

/// The block reduction: for every `v ∈ V1` with nonzero degrees, tile
/// `G_v` into blocks of side `d_v = min_i d_i(v)` and ask `solver` about
/// every block combination.
pub fn kclique_via_k1(
    g: &KPartiteGraph,
    k: usize,
    solver: &dyn Fn(&KPartiteGraph) -> Result<bool>,
) -> Result<bool> {
    if g.k() != k || k < 4 {
        return invalid(format!(
            "block reduction needs k >= 4 parts, got k = {k} on {} parts",
            g.k()
        ));
    }
    for v in g.part_range(0) {
        let degrees: Vec<usize> = (1..k).map(|i| g.degree_in_part(v, i)).collect();
        let dv = degrees.iter().copied().min().unwrap_or(0);
        if dv == 0 {
            continue;
        }
        let gv = neighbourhood_graph(g, v)?.graph;
        let tiles: Vec<Vec<Vec<usize>>> = (0..k - 1)
            .map(|i| {
                gv.part_range(i)
                    .collect::<Vec<_>>()
                    .chunks(dv)
                    .map(<[usize]>::to_vec)
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; k - 1];
        loop {
            let parts: Vec<Vec<usize>> = (0..k - 1).map(|i| tiles[i][pick[i]].clone()).collect();
            if solver(&gv.induced_by_parts(&parts)?.graph)? {
                return Ok(true);
            }
            // odometer over block combinations
            let mut i = 0;
            while i < k - 1 {
                pick[i] += 1;
                if pick[i] < tiles[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == k - 1 {
                break;
            }
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    DepthCap,
    HeavyVertex,
    SparseBase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub parent: Option<usize>,
    pub k: usize,
    pub depth: usize,
    pub depth_cap: usize,
    pub alpha: f64,
    pub part_sizes: Vec<usize>,
    pub branch: Branch,
    pub heavy_vertex: Option<usize>,
    /// `Π |V_i|` in decimal.
    pub product: String,
    /// `Σ_children Π |V_i|` over the split children, heavy-vertex nodes only.
    pub child_product_sum: Option<String>,
    pub found: bool,
}

impl TraceNode {
    /// The shrinkage inequality; trivially true for other branches.
    pub fn shrinkage_holds(&self) -> bool {
        match &self.child_product_sum {
            None => true,
            Some(c) => {
                let c: BigUint = c.parse().expect("decimal");
                let p: BigUint = self.product.parse().expect("decimal");
                at_most_complement(&c, self.alpha, &p)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub nodes: Vec<TraceNode>,
}

impl RecursionTrace {
    pub fn heavy_nodes(&self) -> impl Iterator<Item = &TraceNode> {
        self.nodes
            .iter()
            .filter(|n| n.branch == Branch::HeavyVertex)
    }
}

/// The recursive detector for one clique size with a fixed base detector.
pub struct KCliqueDetector<'a> {
    pub base: &'a dyn TriangleDetector,
    pub policy: ParamPolicy,
    /// Dispatch the split children on the rayon pool. Disables tracing.
    pub parallel: bool,
}

struct Ctx<'t> {
    trace: Option<&'t mut RecursionTrace>,
}

impl<'a> KCliqueDetector<'a> {
    pub fn new(base: &'a dyn TriangleDetector, policy: ParamPolicy) -> Self {
        KCliqueDetector {
            base,
            policy,
            parallel: false,
        }
    }

    pub fn detect(&self, g: &KPartiteGraph) -> Result<bool> {
        let params = self.policy.params(g);
        self.level(g, params, &mut Ctx { trace: None }, None)
    }

    pub fn detect_traced(&self, g: &KPartiteGraph) -> Result<(bool, RecursionTrace)> {
        let mut trace = RecursionTrace::default();
        let params = self.policy.params(g);
        let found = self.level(
            g,
            params,
            &mut Ctx {
                trace: Some(&mut trace),
            },
            None,
        )?;
        Ok((found, trace))
    }

    fn record(&self, ctx: &mut Ctx, node: TraceNode) -> Option<usize> {
        ctx.trace.as_mut().map(|t| {
            t.nodes.push(node);
            t.nodes.len() - 1
        })
    }

    fn finish(&self, ctx: &mut Ctx, id: Option<usize>, found: bool) {
        if let (Some(t), Some(i)) = (ctx.trace.as_mut(), id) {
            t.nodes[i].found = found;
        }
    }

    fn level(
        &self,
        g: &KPartiteGraph,
        p: RecursionParams,
        ctx: &mut Ctx,
        parent: Option<usize>,
    ) -> Result<bool> {
        let k = g.k();
        if k < 3 {
            return invalid(format!("k-clique detection needs k >= 3, got {k}"));
        }
        if g.part_sizes().contains(&0) {
            return Ok(false);
        }
        if k == 3 {
            return Ok(self.base.detect(g)?.is_some());
        }
        let product = g.part_size_product(0);
        let node = |branch, heavy, child: Option<&BigUint>| TraceNode {
            parent,
            k,
            depth: p.depth,
            depth_cap: p.depth_cap,
            alpha: p.alpha,
            part_sizes: g.part_sizes().to_vec(),
            branch,
            heavy_vertex: heavy,
            product: product.to_string(),
            child_product_sum: child.map(ToString::to_string),
            found: false,
        };

        if p.depth >= p.depth_cap {
            let id = self.record(ctx, node(Branch::DepthCap, None, None));
            let found = exhaustive_kclique(g).is_some();
            self.finish(ctx, id, found);
            return Ok(found);
        }

        if let Some(v) = find_heavy_vertex(g, p.alpha) {
            let nbrs: Vec<Vec<usize>> = (1..k).map(|i| g.neighbors(v, i).collect()).collect();
            let rest: Vec<Vec<usize>> = (1..k)
                .map(|i| g.part_range(i).filter(|u| !g.has_edge(v, *u)).collect())
                .collect();
            let combos: Vec<Vec<Vec<usize>>> = (0..(1usize << (k - 1)) - 1)
                .map(|mask| {
                    let mut parts = vec![g.part_range(0).collect::<Vec<_>>()];
                    for i in 0..k - 1 {
                        parts.push(if mask >> i & 1 == 1 {
                            nbrs[i].clone()
                        } else {
                            rest[i].clone()
                        });
                    }
                    parts
                })
                .collect();
            let child_sum: BigUint = combos
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|x| BigUint::from(x.len()))
                        .product::<BigUint>()
                })
                .sum();
            let id = self.record(ctx, node(Branch::HeavyVertex, Some(v), Some(&child_sum)));
            // step 2a: a (k-1)-clique among the neighbours completes one with v
            let gv = neighbourhood_graph(g, v)?.graph;
            if exhaustive_kclique(&gv).is_some() {
                self.finish(ctx, id, true);
                return Ok(true);
            }
            let child_params = RecursionParams {
                depth: p.depth + 1,
                ..p
            };
            let found = if self.parallel && ctx.trace.is_none() {
                let hits: Result<Vec<bool>> = combos
                    .par_iter()
                    .filter(|c| c.iter().all(|x| !x.is_empty()))
                    .map(|c| {
                        let sub = g.induced_by_parts(c)?;
                        self.level(&sub.graph, child_params, &mut Ctx { trace: None }, None)
                    })
                    .collect();
                hits?.into_iter().any(|b| b)
            } else {
                let mut found = false;
                for c in combos.iter().filter(|c| c.iter().all(|x| !x.is_empty())) {
                    let sub = g.induced_by_parts(c)?;
                    if self.level(&sub.graph, child_params, ctx, id)? {
                        found = true;
                        break;
                    }
                }
                found
            };
            self.finish(ctx, id, found);
            return Ok(found);
        }

        let id = self.record(ctx, node(Branch::SparseBase, None, None));
        let found = kclique_via_k1(g, k, &|sub| {
            let params = self.policy.params(sub);
            self.level(sub, params, &mut Ctx { trace: None }, None)
        })?;
        self.finish(ctx, id, found);
        Ok(found)
    }
}

/// Decides whether `g` has a cross-part `k`-clique with fixed `params` at
/// every level.
pub fn detect_kclique(
    g: &KPartiteGraph,
    k: usize,
    base: &dyn TriangleDetector,
    params: RecursionParams,
) -> Result<bool> {
    if g.k() != k {
        return invalid(format!("graph has {} parts, expected k = {k}", g.k()));
    }
    let det = KCliqueDetector::new(
        base,
        ParamPolicy::Fixed {
            alpha: params.alpha,
            depth_cap: params.depth_cap,
        },
    );
    det.level(g, params, &mut Ctx { trace: None }, None)
}

/// Turns a decision procedure into a witness by halving every part and
/// following a sub-instance the detector accepts.
pub fn find_witness(
    detector: &dyn Fn(&KPartiteGraph) -> Result<bool>,
    g: &KPartiteGraph,
    k: usize,
) -> Result<Option<Vec<usize>>> {
    if g.k() != k {
        return invalid(format!("graph has {} parts, expected k = {k}", g.k()));
    }
    if !detector(g)? {
        return Ok(None);
    }
    let mut parts: Vec<Vec<usize>> = (0..k).map(|i| g.part_range(i).collect()).collect();
    while parts.iter().any(|p| p.len() > 1) {
        let halves: Vec<Vec<Vec<usize>>> = parts
            .iter()
            .map(|p| {
                if p.len() > 1 {
                    let (a, b) = p.split_at(p.len() / 2);
                    vec![a.to_vec(), b.to_vec()]
                } else {
                    vec![p.clone()]
                }
            })
            .collect();
        let combos: usize = halves.iter().map(Vec::len).product();
        let mut next = None;
        for code in 0..combos {
            let mut rest = code;
            let pick: Vec<Vec<usize>> = halves
                .iter()
                .map(|h| {
                    let c = h[rest % h.len()].clone();
                    rest /= h.len();
                    c
                })
                .collect();
            if detector(&g.induced_by_parts(&pick)?.graph)? {
                next = Some(pick);
                break;
            }
        }
        parts = next.ok_or_else(|| {
            Error::InternalInconsistency(
                "detector accepted an instance but none of its halvings".into(),
            )
        })?;
    }
    let w: Vec<usize> = parts.into_iter().map(|p| p[0]).collect();
    for (a, &u) in w.iter().enumerate() {
        for &v in &w[a + 1..] {
            if !g.has_edge(u, v) {
                return Err(Error::InternalInconsistency(format!(
                    "halving ended at {w:?}, missing edge {u}-{v}"
                )));
            }
        }
    }
    Ok(Some(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_kclique;
    use crate::triangle::{FourRussiansDetector, NaiveDetector};

    #[test]
    fn parameter_formulas() {
        let p = choose_params(1 << 16, 4, CostProfile::ZERO);
        assert_eq!(p.depth_cap, 1);
        assert_eq!(raw_params(1 << 16, 4, CostProfile::ZERO).1, 6.0);
        assert_eq!(p.alpha, 0.5);
        let (d, a) = raw_params(1usize << 32, 4, CostProfile::ZERO);
        assert_eq!((d, a), (2, 3.5));
        assert_eq!(choose_params(2, 7, CostProfile::ZERO).depth_cap, 0);
    }

    #[test]
    fn exact_fraction_tests() {
        let p = BigUint::from(100u32);
        assert!(at_least_fraction(&BigUint::from(50u32), 0.5, &p));
        assert!(!at_least_fraction(&BigUint::from(49u32), 0.5, &p));
        assert!(at_most_complement(&BigUint::from(75u32), 0.25, &p));
        assert!(!at_most_complement(&BigUint::from(76u32), 0.25, &p));
        assert!(at_least_fraction(&BigUint::from(600u32), 6.0, &p));
    }

    #[test]
    fn heavy_vertex_tie_break() {
        let g = KPartiteGraph::complete(vec![3, 3, 3, 3]);
        assert_eq!(find_heavy_vertex(&g, 0.99), Some(0));
        let edges = [(1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8)];
        let g = KPartiteGraph::from_edges(vec![3, 2, 2, 2], edges).unwrap();
        assert_eq!(find_heavy_vertex(&g, 0.5), Some(1));
        assert_eq!(
            find_heavy_vertex(&KPartiteGraph::edgeless(vec![2, 2, 2]), 0.1),
            None
        );
    }

    #[test]
    fn block_reduction_basics() {
        let solver = |g: &KPartiteGraph| Ok(exhaustive_kclique(g).is_some());
        assert!(kclique_via_k1(&KPartiteGraph::complete(vec![3; 4]), 4, &solver).unwrap());
        let g = KPartiteGraph::from_edges(vec![1, 2, 2, 2], [(1, 3), (3, 5), (1, 5)]).unwrap();
        assert!(!kclique_via_k1(&g, 4, &solver).unwrap());
    }

    #[test]
    fn complete_and_missing_edge() {
        let fr = FourRussiansDetector::default();
        let g = KPartiteGraph::complete(vec![3; 5]);
        for base in [&NaiveDetector as &dyn TriangleDetector, &fr] {
            let params = RecursionParams::new(3, 0.25).unwrap();
            assert!(detect_kclique(&g, 5, base, params).unwrap());
            let det = KCliqueDetector::new(
                base,
                ParamPolicy::Fixed {
                    alpha: 0.25,
                    depth_cap: 3,
                },
            );
            let w = find_witness(&|h| det.detect(h), &g, 5).unwrap().unwrap();
            assert_eq!(w.len(), 5);
        }
        let g =
            KPartiteGraph::from_edges(vec![1, 1, 1, 1], [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
                .unwrap();
        assert_eq!(brute_kclique(&g, 4), None);
        let params = RecursionParams::new(2, 0.5).unwrap();
        assert!(!detect_kclique(&g, 4, &NaiveDetector, params).unwrap());
    }

    #[test]
    fn traces_respect_shrinkage() {
        let g = KPartiteGraph::complete(vec![4; 4]);
        let mut edges: Vec<(usize, usize)> =
            g.edges().filter(|&(u, v)| !(u == 5 && v == 9)).collect();
        edges.retain(|&(u, _)| u != 1);
        let g = KPartiteGraph::from_edges(vec![4; 4], edges).unwrap();
        let det = KCliqueDetector::new(
            &NaiveDetector,
            ParamPolicy::Fixed {
                alpha: 0.25,
                depth_cap: 3,
            },
        );
        let (found, trace) = det.detect_traced(&g).unwrap();
        assert_eq!(found, brute_kclique(&g, 4).is_some());
        assert!(trace.heavy_nodes().count() > 0);
        assert!(trace
            .nodes
            .iter()
            .all(|n| n.shrinkage_holds() && n.depth <= n.depth_cap));
    }
}
