//! Brute-force reference implementations.
//!
//! These read the input only through its edge list and use plain nested
//! loops over a dense boolean matrix, so they share no code path with the
//! bit-parallel engines they check.

use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use crate::hypergraph::UniformHypergraph;
use crate::witness::{Collector, ListingResult};
use std::collections::HashSet;
use std::ops::Range;

struct DenseView {
    parts: Vec<Range<usize>>,
    adj: Vec<Vec<bool>>,
}

impl DenseView {
    fn new(g: &KPartiteGraph) -> Self {
        let n = g.n();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let mut parts = Vec::new();
        let mut start = 0;
        for &s in g.part_sizes() {
            parts.push(start..start + s);
            start += s;
        }
        DenseView { parts, adj }
    }
}

/// Every triangle of a 3-part graph by triple loop, lexicographic order.
pub fn brute_triangles(g: &KPartiteGraph) -> Result<ListingResult> {
    brute_triangles_limited(g, None)
}

pub fn brute_triangles_limited(g: &KPartiteGraph, t: Option<usize>) -> Result<ListingResult> {
    if g.k() != 3 {
        return invalid(format!("triangle oracle needs 3 parts, got {}", g.k()));
    }
    let d = DenseView::new(g);
    let mut out = Collector::new(t);
    for a in d.parts[0].clone() {
        for b in d.parts[1].clone() {
            if !d.adj[a][b] {
                continue;
            }
            for c in d.parts[2].clone() {
                if d.adj[a][c] && d.adj[b][c] && out.push(&[a, b, c]).is_break() {
                    return Ok(out.finish());
                }
            }
        }
    }
    Ok(out.finish())
}

/// Lexicographically first cross-part k-clique, if any.
pub fn brute_kclique(g: &KPartiteGraph, k: usize) -> Option<Vec<usize>> {
    if g.k() != k || k == 0 {
        return None;
    }
    let d = DenseView::new(g);
    let mut chosen = Vec::with_capacity(k);
    fn extend(d: &DenseView, chosen: &mut Vec<usize>) -> bool {
        let depth = chosen.len();
        if depth == d.parts.len() {
            return true;
        }
        for v in d.parts[depth].clone() {
            if chosen.iter().all(|&u| d.adj[u][v]) {
                chosen.push(v);
                if extend(d, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    extend(&d, &mut chosen).then_some(chosen)
}

/// Number of cross-part k-cliques (one vertex per part).
pub fn brute_kclique_count(g: &KPartiteGraph) -> u64 {
    let d = DenseView::new(g);
    fn count(d: &DenseView, chosen: &mut Vec<usize>) -> u64 {
        if chosen.len() == d.parts.len() {
            return 1;
        }
        let mut total = 0;
        for v in d.parts[chosen.len()].clone() {
            if chosen.iter().all(|&u| d.adj[u][v]) {
                chosen.push(v);
                total += count(d, chosen);
                chosen.pop();
            }
        }
        total
    }
    count(&d, &mut Vec::new())
}

/// All k-tuples (one vertex per part) whose every r-subset is a hyperedge.
pub fn brute_hypercliques(
    h: &UniformHypergraph,
    k: usize,
    t: Option<usize>,
) -> Result<ListingResult> {
    if h.r() > k {
        return invalid(format!("r = {} exceeds k = {k}", h.r()));
    }
    if h.k() != k {
        return invalid(format!("hypergraph has {} parts, expected {k}", h.k()));
    }
    let edges: HashSet<Vec<usize>> = h.edges().iter().cloned().collect();
    let subsets = index_subsets(k, h.r());
    let parts: Vec<Range<usize>> = (0..k).map(|i| h.part_range(i)).collect();
    let mut out = Collector::new(t);
    let mut tuple = vec![0usize; k];
    let total: usize = parts.iter().map(|p| p.len()).product();
    for code in 0..total {
        let mut rest = code;
        for i in (0..k).rev() {
            let len = parts[i].len();
            tuple[i] = parts[i].start + rest % len;
            rest /= len;
        }
        let ok = subsets.iter().all(|s| {
            let e: Vec<usize> = s.iter().map(|&i| tuple[i]).collect();
            edges.contains(&e)
        });
        if ok && out.push(&tuple).is_break() {
            break;
        }
    }
    Ok(out.finish())
}

/// Index subsets of `{0, …, k-1}` of size `r`, lexicographic.
fn index_subsets(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << k) {
        if mask.count_ones() as usize == r {
            out.push((0..k).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_tripartite_has_27() {
        let g = KPartiteGraph::complete(vec![3, 3, 3]);
        assert_eq!(brute_triangles(&g).unwrap().len(), 27);
        let e = KPartiteGraph::edgeless(vec![3, 3, 3]);
        assert!(brute_triangles(&e).unwrap().is_empty());
        assert!(brute_triangles(&KPartiteGraph::edgeless(vec![1, 1])).is_err());
    }

    #[test]
    fn planted_single_triangle() {
        let g = KPartiteGraph::from_edges(vec![20, 20, 20], [(3, 25), (3, 47), (25, 47)]).unwrap();
        assert_eq!(
            brute_triangles(&g).unwrap().witnesses,
            vec![vec![3, 25, 47]]
        );
    }

    #[test]
    fn kclique_first_and_empty_part() {
        let g = KPartiteGraph::complete(vec![2, 2, 2, 2]);
        assert_eq!(brute_kclique(&g, 4), Some(vec![0, 2, 4, 6]));
        let g = KPartiteGraph::complete(vec![2, 0, 2, 2]);
        assert_eq!(brute_kclique(&g, 4), None);
    }

    #[test]
    fn complete_hypergraph_sixteen() {
        let h = UniformHypergraph::complete(3, vec![2, 2, 2, 2]).unwrap();
        assert_eq!(brute_hypercliques(&h, 4, None).unwrap().len(), 16);
        let mut edges = h.edges().to_vec();
        let removed = edges.remove(0);
        let h2 = UniformHypergraph::new(3, vec![2, 2, 2, 2], edges).unwrap();
        let r = brute_hypercliques(&h2, 4, None).unwrap();
        assert_eq!(r.len(), 14);
        assert!(r
            .witnesses
            .iter()
            .all(|w| !removed.iter().all(|v| w.contains(v))));
        assert!(brute_hypercliques(&h, 2, None).is_err());
    }
}
