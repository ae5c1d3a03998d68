//! k-partite r-uniform hypergraphs.

use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use std::collections::HashSet;
use std::ops::Range;

/// Hyperedges are stored as ascending global-id tuples, one vertex per
/// distinct part, both as a sorted list and a hash set for membership.
#[derive(Clone, Debug)]
pub struct UniformHypergraph {
    r: usize,
    part_sizes: Vec<usize>,
    offsets: Vec<usize>,
    part_of: Vec<u32>,
    edges: Vec<Vec<usize>>,
    index: HashSet<Vec<usize>>,
}

impl PartialEq for UniformHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.part_sizes == other.part_sizes && self.edges == other.edges
    }
}

impl Eq for UniformHypergraph {}

impl UniformHypergraph {
    /// Strict constructor: every malformed or repeated hyperedge is an error.
    pub fn new(
        r: usize,
        part_sizes: Vec<usize>,
        edges: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        Self::build(r, part_sizes, edges, false)
    }

    /// Like [`UniformHypergraph::new`] but silently merges repeated hyperedges.
    pub fn new_dedup(
        r: usize,
        part_sizes: Vec<usize>,
        edges: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        Self::build(r, part_sizes, edges, true)
    }

    fn build(
        r: usize,
        part_sizes: Vec<usize>,
        edges: impl IntoIterator<Item = Vec<usize>>,
        dedup: bool,
    ) -> Result<Self> {
        if r == 0 {
            return invalid("uniformity r must be at least 1");
        }
        if r > part_sizes.len() {
            return invalid(format!(
                "r = {r} exceeds the number of parts k = {}",
                part_sizes.len()
            ));
        }
        let mut offsets = vec![0];
        let mut part_of = Vec::new();
        for (i, &s) in part_sizes.iter().enumerate() {
            part_of.extend(std::iter::repeat_n(i as u32, s));
            offsets.push(offsets[i] + s);
        }
        let n = part_of.len();
        let mut index = HashSet::new();
        let mut list = Vec::new();
        for mut e in edges {
            if e.len() != r {
                return invalid(format!(
                    "hyperedge {e:?} has {} vertices, expected {r}",
                    e.len()
                ));
            }
            if let Some(&bad) = e.iter().find(|&&v| v >= n) {
                return invalid(format!("vertex {bad} out of range (n = {n})"));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| part_of[w[0]] == part_of[w[1]]) {
                return invalid(format!("hyperedge {e:?} has two vertices in one part"));
            }
            if index.insert(e.clone()) {
                list.push(e);
            } else if !dedup {
                return invalid(format!("duplicate hyperedge {e:?}"));
            }
        }
        list.sort_unstable();
        Ok(UniformHypergraph {
            r,
            part_sizes,
            offsets,
            part_of,
            edges: list,
            index,
        })
    }

    /// The r = 2 view of an ordinary k-partite graph.
    pub fn from_graph(graph: &KPartiteGraph) -> Self {
        Self::new(
            2,
            graph.part_sizes().to_vec(),
            graph.edges().map(|(u, v)| vec![u, v]),
        )
        .expect("graph edges are valid 2-uniform hyperedges")
    }

    /// Every cross-part r-tuple.
    pub fn complete(r: usize, part_sizes: Vec<usize>) -> Result<Self> {
        let empty = Self::new(r, part_sizes, [])?;
        let mut edges = Vec::new();
        empty.for_each_cross_tuple(|t| edges.push(t.to_vec()));
        Self::new(r, empty.part_sizes, edges)
    }

    /// Calls `f` on every ascending r-tuple with vertices in distinct parts.
    pub fn for_each_cross_tuple(&self, mut f: impl FnMut(&[usize])) {
        let k = self.k();
        let mut parts = Vec::with_capacity(self.r);
        let mut tuple = Vec::with_capacity(self.r);
        fn choose_parts(
            h: &UniformHypergraph,
            start: usize,
            k: usize,
            parts: &mut Vec<usize>,
            tuple: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if parts.len() == h.r {
                fill(h, 0, parts, tuple, f);
                return;
            }
            for p in start..k {
                parts.push(p);
                choose_parts(h, p + 1, k, parts, tuple, f);
                parts.pop();
            }
        }
        fn fill(
            h: &UniformHypergraph,
            depth: usize,
            parts: &[usize],
            tuple: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if depth == parts.len() {
                f(tuple);
                return;
            }
            for v in h.part_range(parts[depth]) {
                tuple.push(v);
                fill(h, depth + 1, parts, tuple, f);
                tuple.pop();
            }
        }
        choose_parts(self, 0, k, &mut parts, &mut tuple, &mut f);
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.part_sizes.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn part_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn part_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v] as usize
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Membership test for an ascending tuple.
    pub fn contains_sorted(&self, tuple: &[usize]) -> bool {
        self.index.contains(tuple)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        let mut t = tuple.to_vec();
        t.sort_unstable();
        self.index.contains(&t)
    }

    /// The (k-1)-partite (r-1)-uniform hypergraph `G_v` on parts `1..k`:
    /// `{u_1, …, u_{r-1}}` is a hyperedge iff `{v, u_1, …, u_{r-1}}` is one.
    /// Vertex ids are shifted down by `|V_0|`.
    pub fn adjacency_subgraph(&self, v: usize) -> Result<UniformHypergraph> {
        if v >= self.n() || self.part_of(v) != 0 {
            return invalid(format!("vertex {v} is not in the first part"));
        }
        if self.r < 2 {
            return invalid("adjacency subgraphs need r >= 2");
        }
        let shift = self.part_sizes[0];
        let sub = self
            .edges
            .iter()
            .filter(|e| e[0] == v)
            .map(|e| e[1..].iter().map(|&u| u - shift).collect::<Vec<_>>());
        UniformHypergraph::new(self.r - 1, self.part_sizes[1..].to_vec(), sub)
    }
}
