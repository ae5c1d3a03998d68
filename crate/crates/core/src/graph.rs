//! k-partite graphs with bit-packed adjacency rows.
//!
//! Global vertex ids are contiguous per part: part 0 owns `0..|V_0|`, part 1
//! the next `|V_1|` ids and so on. Every row spans all `n` ids, so the
//! intersection `N_i(u) ∩ N_i(v)` is a word-wise AND of two rows restricted
//! to part `i`'s range.

use crate::bits::{self, words_for, BitSet, Ones};
use crate::error::{invalid, Error, Result};
use num_bigint::BigUint;
use std::collections::HashSet;
use std::ops::Range;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KPartiteGraph {
    part_sizes: Vec<usize>,
    offsets: Vec<usize>,
    part_of: Vec<u32>,
    row_words: usize,
    rows: Vec<u64>,
}

/// Neighbours of one vertex inside a single part, `N_i(v)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeighborSet {
    pub part: usize,
    pub bits: BitSet,
}

impl NeighborSet {
    /// `d_i(v)`.
    pub fn degree(&self) -> usize {
        self.bits.count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }
}

/// An induced subgraph together with the original id of every new vertex.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: KPartiteGraph,
    pub origin: Vec<usize>,
}

impl Subgraph {
    pub fn map_back(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&v| self.origin[v]).collect()
    }
}

/// Disjoint vertex sets, each lying inside a single part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSubsetFamily {
    subsets: Vec<Vec<usize>>,
}

impl VertexSubsetFamily {
    pub fn new(graph: &KPartiteGraph, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for set in &subsets {
            let mut part = None;
            for &v in set {
                if v >= graph.n() {
                    return invalid(format!("vertex {v} out of range (n = {})", graph.n()));
                }
                if !seen.insert(v) {
                    return invalid(format!("vertex {v} appears in more than one subset"));
                }
                let p = graph.part_of(v);
                match part {
                    None => part = Some(p),
                    Some(q) if q != p => {
                        return invalid(format!("subset mixes parts {q} and {p}"));
                    }
                    _ => {}
                }
            }
        }
        Ok(VertexSubsetFamily { subsets })
    }

    /// One subset per part holding the whole part.
    pub fn all(graph: &KPartiteGraph) -> Self {
        VertexSubsetFamily {
            subsets: (0..graph.k())
                .map(|i| graph.part_range(i).collect())
                .collect(),
        }
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    fn to_mask(&self, n: usize) -> BitSet {
        BitSet::from_indices(n, self.subsets.iter().flatten().copied())
    }
}

impl KPartiteGraph {
    pub fn edgeless(part_sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(part_sizes.len() + 1);
        let mut part_of = Vec::new();
        offsets.push(0);
        for (i, &size) in part_sizes.iter().enumerate() {
            part_of.extend(std::iter::repeat_n(i as u32, size));
            offsets.push(offsets[i] + size);
        }
        let n = *offsets.last().unwrap();
        let row_words = words_for(n);
        KPartiteGraph {
            part_sizes,
            offsets,
            part_of,
            row_words,
            rows: vec![0; n * row_words],
        }
    }

    /// Builds a graph, rejecting intra-part, out-of-range and repeated edges.
    pub fn from_edges(
        part_sizes: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut builder = GraphBuilder::new(part_sizes);
        for (u, v) in edges {
            if !builder.add_edge(u, v)? {
                return invalid(format!("duplicate edge ({u}, {v})"));
            }
        }
        Ok(builder.build())
    }

    /// The complete k-partite graph on the given part sizes.
    pub fn complete(part_sizes: Vec<usize>) -> Self {
        let mut g = KPartiteGraph::edgeless(part_sizes);
        let n = g.n();
        for v in 0..n {
            let own = g.part_range(g.part_of(v));
            let row = &mut g.rows[v * g.row_words..(v + 1) * g.row_words];
            bits::for_range_words(0..n, |w, mask| row[w] |= mask);
            bits::for_range_words(own, |w, mask| row[w] &= !mask);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    #[inline]
    pub fn part_size(&self, i: usize) -> usize {
        self.part_sizes[i]
    }

    #[inline]
    pub fn part_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    #[inline]
    pub fn part_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    #[inline]
    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v] as usize
    }

    #[inline]
    pub fn row_words(&self) -> usize {
        self.row_words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.row_words..(v + 1) * self.row_words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::test_bit(self.row(u), v)
    }

    /// Neighbours of `v` in part `i` as global ids.
    pub fn neighbors(&self, v: usize, i: usize) -> impl Iterator<Item = usize> + '_ {
        bits::ones_in(self.row(v), self.part_range(i))
    }

    pub fn neighbors_in_part(&self, v: usize, i: usize) -> Result<NeighborSet> {
        self.check_vertex(v)?;
        if i >= self.k() {
            return invalid(format!("part {i} out of range (k = {})", self.k()));
        }
        if i == self.part_of(v) {
            return invalid(format!(
                "vertex {v} lies in part {i}; intra-part neighbourhoods are undefined"
            ));
        }
        let mut bits = BitSet::from_words(self.n(), self.row(v).to_vec());
        bits.restrict_to(self.part_range(i));
        Ok(NeighborSet { part: i, bits })
    }

    #[inline]
    pub fn degree_in_part(&self, v: usize, i: usize) -> usize {
        bits::count_range(self.row(v), self.part_range(i))
    }

    /// `d_2(v) · … · d_k(v)` for a vertex of the first part.
    pub fn degree_product(&self, v: usize) -> Result<BigUint> {
        self.check_vertex(v)?;
        if self.part_of(v) != 0 {
            return invalid(format!("vertex {v} is not in the first part"));
        }
        Ok((1..self.k())
            .map(|i| BigUint::from(self.degree_in_part(v, i)))
            .product())
    }

    /// `|V_from| · … · |V_{k-1}|` as a wide integer.
    pub fn part_size_product(&self, from: usize) -> BigUint {
        self.part_sizes[from..]
            .iter()
            .map(|&s| BigUint::from(s))
            .product()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n())
            .map(|v| bits::count_range(self.row(v), v + 1..self.n()))
            .sum()
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n())
            .flat_map(move |u| bits::ones_in(self.row(u), u + 1..self.n()).map(move |v| (u, v)))
    }

    /// Induced subgraph on the union of `keep`; part structure is preserved.
    pub fn induced_subgraph(&self, keep: &VertexSubsetFamily) -> Result<Subgraph> {
        for v in keep.subsets().iter().flatten() {
            self.check_vertex(*v)?;
        }
        Ok(self.induced_by_mask(&keep.to_mask(self.n())))
    }

    /// Induced subgraph on the vertices set in `keep` (global ids).
    pub fn induced_by_mask(&self, keep: &BitSet) -> Subgraph {
        let origin: Vec<usize> = keep.iter().filter(|&v| v < self.n()).collect();
        let sizes = (0..self.k())
            .map(|i| keep.count_in(self.part_range(i)))
            .collect();
        self.induced_from_sorted(origin, sizes)
    }

    /// Induced subgraph keeping `parts[i] ⊆ V_i` for every part.
    pub fn induced_by_parts(&self, parts: &[Vec<usize>]) -> Result<Subgraph> {
        if parts.len() != self.k() {
            return invalid(format!(
                "expected {} vertex lists, got {}",
                self.k(),
                parts.len()
            ));
        }
        let mut origin = Vec::new();
        for (i, list) in parts.iter().enumerate() {
            let range = self.part_range(i);
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if let Some(&bad) = sorted.iter().find(|v| !range.contains(v)) {
                return invalid(format!("vertex {bad} is not in part {i}"));
            }
            origin.extend(sorted);
        }
        let sizes = parts
            .iter()
            .map(|l| {
                let mut s = l.clone();
                s.sort_unstable();
                s.dedup();
                s.len()
            })
            .collect();
        Ok(self.induced_from_sorted(origin, sizes))
    }

    fn induced_from_sorted(&self, origin: Vec<usize>, sizes: Vec<usize>) -> Subgraph {
        let mut graph = KPartiteGraph::edgeless(sizes);
        for (a, &u) in origin.iter().enumerate() {
            let row = self.row(u);
            for (b, &w) in origin.iter().enumerate().skip(a + 1) {
                if bits::test_bit(row, w) {
                    graph.set_edge(a, b);
                }
            }
        }
        Subgraph { graph, origin }
    }

    /// Reorders the parts: new part `i` is old part `order[i]`.
    pub fn permute_parts(&self, order: &[usize]) -> Result<Subgraph> {
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..self.k()).collect::<Vec<_>>() {
            return invalid(format!("{order:?} is not a permutation of the parts"));
        }
        let origin: Vec<usize> = order.iter().flat_map(|&p| self.part_range(p)).collect();
        let sizes = order.iter().map(|&p| self.part_sizes[p]).collect();
        let mut graph = KPartiteGraph::edgeless(sizes);
        let mut new_id = vec![0; self.n()];
        for (a, &u) in origin.iter().enumerate() {
            new_id[u] = a;
        }
        for (u, v) in self.edges() {
            graph.set_edge(new_id[u], new_id[v]);
        }
        Ok(Subgraph { graph, origin })
    }

    /// Full scan of the structural invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n();
        for u in 0..n {
            let row = self.row(u);
            if self.row_words > 0 {
                let tail = n % bits::WORD_BITS;
                if tail != 0 && row[self.row_words - 1] >> tail != 0 {
                    return Err(Error::InternalInconsistency(format!(
                        "row {u} has bits beyond n = {n}"
                    )));
                }
            }
            if bits::count_range(row, self.part_range(self.part_of(u))) != 0 {
                return Err(Error::InternalInconsistency(format!(
                    "vertex {u} has an intra-part edge"
                )));
            }
            for v in Ones::new(row) {
                if !self.has_edge(v, u) {
                    return Err(Error::InternalInconsistency(format!(
                        "edge ({u}, {v}) is not symmetric"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Order-sensitive hash of the part structure and adjacency.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for &s in &self.part_sizes {
            mix(s as u64);
        }
        for &w in &self.rows {
            mix(w);
        }
        h
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return invalid(format!("vertex {v} out of range (n = {})", self.n()));
        }
        Ok(())
    }

    #[inline]
    fn set_edge(&mut self, u: usize, v: usize) {
        let w = self.row_words;
        self.rows[u * w + v / bits::WORD_BITS] |= 1u64 << (v % bits::WORD_BITS);
        self.rows[v * w + u / bits::WORD_BITS] |= 1u64 << (u % bits::WORD_BITS);
    }
}

/// Incremental construction; edges may be added repeatedly.
#[derive(Debug)]
pub struct GraphBuilder {
    graph: KPartiteGraph,
}

impl GraphBuilder {
    pub fn new(part_sizes: Vec<usize>) -> Self {
        GraphBuilder {
            graph: KPartiteGraph::edgeless(part_sizes),
        }
    }

    pub fn graph(&self) -> &KPartiteGraph {
        &self.graph
    }

    /// Returns `false` when the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.graph.n();
        if u >= n || v >= n {
            return invalid(format!("edge ({u}, {v}) references a vertex >= n = {n}"));
        }
        if self.graph.part_of(u) == self.graph.part_of(v) {
            return invalid(format!(
                "edge ({u}, {v}) joins two vertices of part {}",
                self.graph.part_of(u)
            ));
        }
        if self.graph.has_edge(u, v) {
            return Ok(false);
        }
        self.graph.set_edge(u, v);
        Ok(true)
    }

    pub fn build(self) -> KPartiteGraph {
        self.graph
    }
}

/// A plain undirected graph on `0..n`, input to [`kpartify`].
#[derive(Clone, Debug)]
pub struct SimpleGraph {
    adjacency: Vec<BitSet>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![BitSet::new(n); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u}, {v}) out of range (n = {n})"));
            }
            if u == v {
                return invalid(format!("self-loop at {u}"));
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(SimpleGraph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }
}

/// k copies of the vertex set; `(u_i, v_j)` is an edge iff `uv` is and `i != j`.
pub fn kpartify(graph: &SimpleGraph, k: usize) -> Result<KPartiteGraph> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    let n = graph.n();
    let mut out = KPartiteGraph::edgeless(vec![n; k]);
    for u in 0..n {
        for v in graph.adjacency[u].iter().filter(|&v| v > u) {
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        out.set_edge(i * n + u, j * n + v);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> KPartiteGraph {
        // parts: {0,1} {2,3,4} {5}
        KPartiteGraph::from_edges(vec![2, 3, 1], [(0, 2), (0, 3), (1, 4), (2, 5), (0, 5)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(KPartiteGraph::from_edges(vec![2, 2], [(0, 1)]).is_err());
        assert!(KPartiteGraph::from_edges(vec![2, 2], [(0, 4)]).is_err());
        assert!(KPartiteGraph::from_edges(vec![2, 2], [(0, 2), (2, 0)]).is_err());
    }

    #[test]
    fn neighbourhoods_and_degrees() {
        let g = sample();
        g.check_invariants().unwrap();
        let n1 = g.neighbors_in_part(0, 1).unwrap();
        assert_eq!(n1.iter().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(n1.degree(), 2);
        assert_eq!(g.neighbors(0, 2).collect::<Vec<_>>(), vec![5]);
        assert!(g.neighbors_in_part(0, 0).is_err());
        assert_eq!(g.degree_product(0).unwrap(), BigUint::from(2u32));
        assert_eq!(g.degree_product(1).unwrap(), BigUint::from(0u32));
        assert!(g.degree_product(2).is_err());
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn isolated_and_full_neighbourhoods() {
        let g = KPartiteGraph::complete(vec![1, 4, 2]);
        assert_eq!(g.neighbors_in_part(0, 1).unwrap().degree(), 4);
        let e = KPartiteGraph::edgeless(vec![1, 4, 2]);
        assert_eq!(e.neighbors_in_part(0, 1).unwrap().degree(), 0);
    }

    #[test]
    fn degree_product_of_two_three_four() {
        let g = KPartiteGraph::complete(vec![1, 2, 3, 4]);
        assert_eq!(g.degree_product(0).unwrap(), BigUint::from(24u32));
    }

    #[test]
    fn induced_identity_and_empty() {
        let g = sample();
        let all = g.induced_subgraph(&VertexSubsetFamily::all(&g)).unwrap();
        assert_eq!(all.graph, g);
        let none = g
            .induced_subgraph(&VertexSubsetFamily::new(&g, vec![]).unwrap())
            .unwrap();
        assert_eq!(none.graph.part_sizes(), &[0, 0, 0]);
        assert_eq!(none.graph.edge_count(), 0);
    }

    #[test]
    fn subset_family_validation() {
        let g = sample();
        assert!(VertexSubsetFamily::new(&g, vec![vec![0, 2]]).is_err());
        assert!(VertexSubsetFamily::new(&g, vec![vec![0], vec![0]]).is_err());
        assert!(VertexSubsetFamily::new(&g, vec![vec![9]]).is_err());
    }

    #[test]
    fn permute_parts_maps_edges() {
        let g = sample();
        let p = g.permute_parts(&[1, 0, 2]).unwrap();
        for (u, v) in p.graph.edges() {
            assert!(g.has_edge(p.origin[u], p.origin[v]));
        }
        assert_eq!(p.graph.edge_count(), g.edge_count());
        assert_eq!(p.graph.part_sizes(), &[3, 2, 1]);
    }

    #[test]
    fn kpartify_triangle_and_path() {
        let c3 = SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let g = kpartify(&c3, 3).unwrap();
        g.check_invariants().unwrap();
        assert_eq!(g.part_sizes(), &[3, 3, 3]);
        assert!(g.has_edge(0, 3 + 1) && g.has_edge(4, 6 + 2) && g.has_edge(0, 8));
        assert!(!g.has_edge(0, 3));
        assert!(kpartify(&c3, 1).is_err());
        assert!(SimpleGraph::from_edges(3, [(1, 1)]).is_err());
    }
}
