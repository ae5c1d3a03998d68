//! Sparse Four-Russians listing.
//!
//! `V2` and `V3` are cut into blocks of `s` vertices. For every block pair a
//! table maps two small vertex subsets (at most `Δ` vertices each, encoded by
//! their rank in the combinatorial number system) to the exact edge set
//! between them, stored as a `Δ × Δ` bit mask. Each neighbourhood
//! `N_2(v) ∩ block` is cut into consecutive chunks of `Δ` vertices, so every
//! `(v2, v3)` pair lands in exactly one `(chunk, chunk)` lookup.

use super::block_table::BlockScheme;
use super::require_three_parts;
use crate::bits::{self, word_ones};
use crate::budget::{check_index_bits, TableBudget};
use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use crate::witness::{Collector, ListingResult, Triangle};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;

/// Chunk masks are `Δ²` bits wide and must fit one word.
const MAX_CHUNK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseFRParams {
    /// `s`
    pub block_size: usize,
    /// `Δ`
    pub chunk_size: usize,
    pub max_index_bits: u32,
    pub max_table_bytes: u64,
}

fn subset_count(s: usize, delta: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=delta.min(s) {
        total = total.saturating_add(c);
        c = c.saturating_mul((s - i) as u128) / (i as u128 + 1);
    }
    total
}

fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

fn log2_min_part(sizes: [usize; 3]) -> f64 {
    (sizes.iter().copied().min().unwrap_or(2).max(2) as f64).log2()
}

impl SparseFRParams {
    pub fn new(
        block_size: usize,
        chunk_size: usize,
        max_index_bits: u32,
        budget: TableBudget,
    ) -> Result<Self> {
        if chunk_size == 0 || chunk_size > block_size {
            return invalid(format!(
                "chunk size {chunk_size} must satisfy 1 <= chunk <= block size {block_size}"
            ));
        }
        if chunk_size > MAX_CHUNK {
            return invalid(format!("chunk size {chunk_size} exceeds {MAX_CHUNK}"));
        }
        let p = SparseFRParams {
            block_size,
            chunk_size,
            max_index_bits,
            max_table_bytes: budget.max_bytes,
        };
        check_index_bits("sparse Four-Russians table", p.index_bits(), max_index_bits)?;
        Ok(p)
    }

    /// Bits needed to index one `(S, T)` entry of a block-pair table.
    pub fn index_bits(&self) -> u32 {
        2 * ceil_log2(subset_count(self.block_size, self.chunk_size))
    }

    pub fn subsets_per_block(&self) -> u128 {
        subset_count(self.block_size, self.chunk_size)
    }

    /// Worst-case table bytes when every block pair is materialised.
    pub fn table_bytes(&self, v2: usize, v3: usize) -> u128 {
        let pairs = (v2.div_ceil(self.block_size) * v3.div_ceil(self.block_size)) as u128;
        let c = self.subsets_per_block();
        pairs.saturating_mul(c.saturating_mul(c)).saturating_mul(8)
    }

    /// Desk-scale defaults: one block per part, `Δ = max(1, ⌊log2 n / 4⌋)`,
    /// then clamped to the guards.
    pub fn for_sizes(sizes: [usize; 3], max_index_bits: u32, budget: TableBudget) -> Self {
        let s = sizes[1].max(sizes[2]).max(1);
        let delta = ((log2_min_part(sizes) / 4.0).floor() as usize).max(1);
        Self::clamped(sizes, s, delta, max_index_bits, budget)
    }

    /// `s = ⌊(log n)^100⌋`, `Δ = ⌊log n / (1000 log log n)⌋`, then clamped.
    pub fn formula_for_sizes(sizes: [usize; 3], max_index_bits: u32, budget: TableBudget) -> Self {
        let log_n = log2_min_part(sizes);
        let s = log_n.powi(100).floor().min(usize::MAX as f64) as usize;
        let loglog = log_n.log2().max(f64::MIN_POSITIVE);
        let delta = (log_n / (1000.0 * loglog)).floor().max(0.0) as usize;
        let s = s.min(sizes[1].max(sizes[2])).max(1);
        Self::clamped(sizes, s, delta.max(1), max_index_bits, budget)
    }

    pub fn for_graph(g: &KPartiteGraph, max_index_bits: u32, budget: TableBudget) -> Self {
        Self::for_sizes(sizes_of(g), max_index_bits, budget)
    }

    /// Defaults for the `(V2, V1, V3)` pivot used by [`list_sparse_pivoted`].
    pub fn for_pivoted(g: &KPartiteGraph, max_index_bits: u32, budget: TableBudget) -> Self {
        let [a, b, c] = sizes_of(g);
        Self::for_sizes([b, a, c], max_index_bits, budget)
    }

    /// Keeps `Δ` as large as possible, then `s`: for each candidate `Δ` the
    /// largest `s` whose tables pass both guards wins.
    fn clamped(
        sizes: [usize; 3],
        s: usize,
        delta: usize,
        max_index_bits: u32,
        budget: TableBudget,
    ) -> Self {
        let s0 = s.max(1);
        let make = |s: usize, delta: usize| SparseFRParams {
            block_size: s,
            chunk_size: delta,
            max_index_bits,
            max_table_bytes: budget.max_bytes,
        };
        for delta in (1..=delta.clamp(1, MAX_CHUNK).min(s0)).rev() {
            let mut s = s0;
            while s >= delta {
                let p = make(s, delta);
                if p.index_bits() <= max_index_bits
                    && budget.allows(p.table_bytes(sizes[1], sizes[2]))
                {
                    return p;
                }
                s -= (s / 16).max(1);
            }
        }
        make(1, 1)
    }

    fn validate(&self, sizes: [usize; 3]) -> Result<()> {
        if self.chunk_size == 0 || self.chunk_size > self.block_size || self.chunk_size > MAX_CHUNK
        {
            return invalid(format!("invalid sparse parameters {self:?}"));
        }
        check_index_bits(
            "sparse Four-Russians table",
            self.index_bits(),
            self.max_index_bits,
        )?;
        TableBudget::new(self.max_table_bytes).check(
            "sparse Four-Russians tables",
            self.table_bytes(sizes[1], sizes[2]),
        )
    }
}

fn sizes_of(g: &KPartiteGraph) -> [usize; 3] {
    [g.part_size(0), g.part_size(1), g.part_size(2)]
}

/// Ranks subsets of `{0, …, s-1}` with at most `Δ` elements: all subsets of
/// size `m` come after those of size `< m`, ordered colexicographically.
#[derive(Clone, Debug)]
pub struct SubsetIndexer {
    s: usize,
    delta: usize,
    binom: Vec<Vec<u64>>,
    offsets: Vec<u64>,
}

impl SubsetIndexer {
    pub fn new(s: usize, delta: usize) -> Self {
        let delta = delta.min(s);
        let mut binom = vec![vec![0u64; delta + 2]; s + 1];
        for (x, row) in binom.iter_mut().enumerate() {
            row[0] = 1;
            for y in 1..=delta + 1 {
                row[y] = if y > x {
                    0
                } else {
                    // C(x, y) = C(x, y-1) * (x - y + 1) / y
                    ((row[y - 1] as u128 * (x - y + 1) as u128) / y as u128) as u64
                };
            }
        }
        let mut offsets = vec![0u64; delta + 2];
        for m in 0..=delta {
            offsets[m + 1] = offsets[m] + binom[s][m];
        }
        SubsetIndexer {
            s,
            delta,
            binom,
            offsets,
        }
    }

    pub fn count(&self) -> usize {
        self.offsets[self.delta + 1] as usize
    }

    /// Rank of an ascending list of local offsets.
    pub fn rank(&self, elems: &[usize]) -> usize {
        debug_assert!(elems.len() <= self.delta);
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let colex: u64 = elems
            .iter()
            .enumerate()
            .map(|(i, &c)| self.binom[c][i + 1])
            .sum();
        (self.offsets[elems.len()] + colex) as usize
    }

    /// Calls `f(rank, elements)` for every subset of `{0, …, limit-1}`.
    pub fn for_each_subset(&self, limit: usize, mut f: impl FnMut(usize, &[usize])) {
        let limit = limit.min(self.s);
        let mut comb = Vec::with_capacity(self.delta);
        for m in 0..=self.delta.min(limit) {
            comb.clear();
            comb.extend(0..m);
            loop {
                f(self.rank(&comb), &comb);
                // next combination in lexicographic order
                let mut i = m;
                while i > 0 && comb[i - 1] == limit - m + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                comb[i - 1] += 1;
                for x in i..m {
                    comb[x] = comb[x - 1] + 1;
                }
            }
        }
    }
}

/// Cuts an ascending neighbourhood into consecutive chunks of at most `Δ`.
#[cfg_attr(not(debug_assertions), allow(dead_code))]
pub(crate) fn chunk_neighbourhood(elems: &[usize], delta: usize) -> Vec<Vec<usize>> {
    let chunks: Vec<Vec<usize>> = elems.chunks(delta.max(1)).map(<[usize]>::to_vec).collect();
    debug_assert_eq!(chunks.len(), elems.len().div_ceil(delta.max(1)));
    debug_assert!(chunks.iter().all(|c| !c.is_empty() && c.len() <= delta));
    debug_assert_eq!(chunks.concat(), elems);
    chunks
}

#[derive(Clone, Copy)]
struct Chunk {
    block: usize,
    rank: usize,
    base: usize,
    len: usize,
    elems: [u32; MAX_CHUNK],
}

impl Chunk {
    #[inline]
    fn vertex(&self, a: usize) -> usize {
        self.base + self.elems[a] as usize
    }
}

struct ChunkTables<'g> {
    g: &'g KPartiteGraph,
    delta: usize,
    indexer: SubsetIndexer,
    v2: BlockScheme,
    v3: BlockScheme,
    tables: Vec<Option<Box<[u64]>>>,
}

impl<'g> ChunkTables<'g> {
    fn new(g: &'g KPartiteGraph, p: &SparseFRParams) -> Self {
        let v2 = BlockScheme::over_range(1, g.part_range(1), p.block_size);
        let v3 = BlockScheme::over_range(2, g.part_range(2), p.block_size);
        let pairs = v2.len() * v3.len();
        ChunkTables {
            g,
            delta: p.chunk_size,
            indexer: SubsetIndexer::new(p.block_size, p.chunk_size),
            v2,
            v3,
            tables: vec![None; pairs],
        }
    }

    /// The table of one block pair, built on first use.
    fn pair(&mut self, i: usize, j: usize) -> &[u64] {
        let slot = i * self.v3.len() + j;
        if self.tables[slot].is_none() {
            self.tables[slot] = Some(self.build_pair(i, j));
        }
        self.tables[slot].as_deref().unwrap()
    }

    fn build_pair(&self, i: usize, j: usize) -> Box<[u64]> {
        let (bi, bj) = (self.v2.blocks[i].clone(), self.v3.blocks[j].clone());
        let count = self.indexer.count();
        let mut out = vec![0u64; count * count].into_boxed_slice();
        let mut left = Vec::new();
        self.indexer
            .for_each_subset(bi.len(), |r, e| left.push((r, e.to_vec())));
        let mut right = Vec::new();
        self.indexer
            .for_each_subset(bj.len(), |r, e| right.push((r, e.to_vec())));
        let d = self.delta;
        for (rs, s) in &left {
            if s.is_empty() {
                continue;
            }
            let rows: Vec<&[u64]> = s.iter().map(|&a| self.g.row(bi.start + a)).collect();
            for (rt, t) in &right {
                let mut m = 0u64;
                for (a, row) in rows.iter().enumerate() {
                    for (c, &y) in t.iter().enumerate() {
                        if bits::test_bit(row, bj.start + y) {
                            m |= 1 << (a * d + c);
                        }
                    }
                }
                out[rs * count + rt] = m;
            }
        }
        out
    }
}

fn collect_chunks(
    row: &[u64],
    scheme: &BlockScheme,
    indexer: &SubsetIndexer,
    delta: usize,
    out: &mut Vec<Chunk>,
) {
    out.clear();
    let mut local = Vec::new();
    for (block, range) in scheme.blocks.iter().enumerate() {
        local.clear();
        local.extend(bits::ones_in(row, range.clone()).map(|u| u - range.start));
        #[cfg(debug_assertions)]
        chunk_neighbourhood(&local, delta);
        for piece in local.chunks(delta) {
            let mut elems = [0u32; MAX_CHUNK];
            for (slot, &e) in elems.iter_mut().zip(piece) {
                *slot = e as u32;
            }
            out.push(Chunk {
                block,
                rank: indexer.rank(piece),
                base: range.start,
                len: piece.len(),
                elems,
            });
        }
    }
}

/// Emits every triangle `(v1, v2, v3)` to `sink` until it breaks.
pub fn list_sparse_into(
    g: &KPartiteGraph,
    params: &SparseFRParams,
    sink: &mut dyn FnMut(Triangle) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    require_three_parts(g)?;
    params.validate(sizes_of(g))?;
    if g.part_sizes().contains(&0) {
        return Ok(ControlFlow::Continue(()));
    }
    let mut tables = ChunkTables::new(g, params);
    let count = tables.indexer.count();
    let delta = params.chunk_size;
    let (mut c2, mut c3) = (Vec::new(), Vec::new());
    for v in g.part_range(0) {
        let row = g.row(v);
        if bits::count_range(row, g.part_range(1)) == 0
            || bits::count_range(row, g.part_range(2)) == 0
        {
            continue;
        }
        collect_chunks(row, &tables.v2, &tables.indexer, delta, &mut c2);
        collect_chunks(row, &tables.v3, &tables.indexer, delta, &mut c3);
        for s in &c2 {
            for t in &c3 {
                let m = tables.pair(s.block, t.block)[s.rank * count + t.rank];
                for bit in word_ones(m) {
                    let (a, c) = (bit / delta, bit % delta);
                    debug_assert!(a < s.len && c < t.len);
                    if sink([v, s.vertex(a), t.vertex(c)]).is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Lists up to `t` triangles (all when `t` is `None`), pivoting on `V1`.
pub fn list_sparse_four_russians(
    g: &KPartiteGraph,
    t: Option<usize>,
    params: &SparseFRParams,
) -> Result<ListingResult> {
    let mut out = Collector::new(t);
    let _ = list_sparse_into(g, params, &mut |tri| out.push(&tri))?;
    Ok(out.finish())
}

/// The same lister run on `(V2, V1, V3)`; cost is driven by `e(V2, V3)`.
/// `params` describe the pivoted instance, see [`SparseFRParams::for_pivoted`].
pub fn list_sparse_pivoted_into(
    g: &KPartiteGraph,
    params: &SparseFRParams,
    sink: &mut dyn FnMut(Triangle) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    require_three_parts(g)?;
    let pivot = g.permute_parts(&[1, 0, 2])?;
    let origin = &pivot.origin;
    list_sparse_into(&pivot.graph, params, &mut |[b, a, c]| {
        sink([origin[a], origin[b], origin[c]])
    })
}

pub fn list_sparse_pivoted(
    g: &KPartiteGraph,
    t: Option<usize>,
    params: &SparseFRParams,
) -> Result<ListingResult> {
    let mut out = Collector::new(t);
    let _ = list_sparse_pivoted_into(g, params, &mut |tri| out.push(&tri))?;
    Ok(out.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_triangles;
    use std::collections::HashSet;

    fn budget() -> TableBudget {
        TableBudget::default()
    }

    #[test]
    fn indexer_ranks_are_a_bijection() {
        for (s, d) in [(1, 1), (5, 2), (9, 3), (12, 4), (8, 8)] {
            let ix = SubsetIndexer::new(s, d);
            let mut seen = HashSet::new();
            ix.for_each_subset(s, |r, e| {
                assert!(r < ix.count());
                assert!(seen.insert(r), "rank {r} repeated for {e:?}");
            });
            assert_eq!(seen.len(), ix.count());
            assert_eq!(ix.count() as u128, subset_count(s, d));
        }
    }

    #[test]
    fn short_blocks_use_a_prefix_of_ranks() {
        let ix = SubsetIndexer::new(10, 2);
        let mut n = 0;
        ix.for_each_subset(4, |_, e| {
            assert!(e.iter().all(|&x| x < 4));
            n += 1;
        });
        assert_eq!(n, 1 + 4 + 6);
    }

    #[test]
    fn chunk_partition_property() {
        let elems: Vec<usize> = (0..23).map(|x| x * 3 + 1).collect();
        for delta in 1..=8 {
            let chunks = chunk_neighbourhood(&elems, delta);
            assert_eq!(chunks.len(), elems.len().div_ceil(delta));
            let mut all: Vec<usize> = chunks.iter().flatten().copied().collect();
            all.sort();
            all.dedup();
            assert_eq!(all, elems);
        }
    }

    #[test]
    fn complete_graph_listing_and_threshold() {
        let g = KPartiteGraph::complete(vec![3, 3, 3]);
        let p = SparseFRParams::new(2, 2, 26, budget()).unwrap();
        let all = list_sparse_four_russians(&g, None, &p).unwrap();
        assert_eq!(all.len(), 27);
        assert!(!all.truncated);
        let five = list_sparse_four_russians(&g, Some(5), &p).unwrap();
        assert_eq!(five.len(), 5);
        assert!(five.truncated);
        assert_eq!(five.as_set().len(), 5);
        let exact = list_sparse_four_russians(&g, Some(27), &p).unwrap();
        assert!(!exact.truncated);
    }

    #[test]
    fn pivoted_matches_oracle() {
        let edges = [(0, 3), (0, 6), (3, 6), (1, 4), (1, 7), (2, 5)];
        let g = KPartiteGraph::from_edges(vec![3, 3, 3], edges).unwrap();
        let p = SparseFRParams::for_pivoted(&g, 26, budget());
        assert_eq!(
            list_sparse_pivoted(&g, None, &p).unwrap().witnesses,
            brute_triangles(&g).unwrap().witnesses
        );
        let no23 = KPartiteGraph::from_edges(vec![3, 3, 3], [(0, 3), (0, 6)]).unwrap();
        assert!(list_sparse_pivoted(&no23, None, &p).unwrap().is_empty());
    }

    #[test]
    fn parameter_validation_and_clamping() {
        assert!(SparseFRParams::new(4, 0, 26, budget()).is_err());
        assert!(SparseFRParams::new(4, 5, 26, budget()).is_err());
        assert!(SparseFRParams::new(4000, 4, 26, budget()).is_err());
        let p = SparseFRParams::for_sizes([4096, 4096, 4096], 26, budget());
        assert!(p.index_bits() <= 26);
        assert!(budget().allows(p.table_bytes(4096, 4096)));
        let formula = SparseFRParams::formula_for_sizes([64, 64, 64], 26, budget());
        assert_eq!(formula.chunk_size, 1);
        assert!(formula.index_bits() <= 26);
    }
}
