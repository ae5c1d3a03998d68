//! Fixed-order bit encodings of small `(r-1)`-uniform hypergraphs.
//!
//! The representation of a hypergraph on one block tuple `V^j` is the
//! concatenation of one segment per index set `I` (lexicographic over the
//! sorted `(r-1)`-subsets of the `k-1` parts). A segment has `s^{r-1}` bits,
//! one per tuple of local offsets in row-major order (first coordinate most
//! significant). Offsets past the end of a short last block are padding and
//! are never set.

use super::HypercliqueParams;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::UniformHypergraph;
use serde::{Deserialize, Serialize};

/// Sorted `size`-subsets of `0..n`, lexicographic.
pub fn index_sets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn go(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(n, size, x + 1, cur, out);
            cur.pop();
        }
    }
    go(n, size, 0, &mut cur, &mut out);
    out
}

/// Segment order and bit positions for one `(k, r, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    /// `k - 1`
    pub parts: usize,
    /// `r - 1`
    pub arity: usize,
    pub block_size: usize,
    pub index_sets: Vec<Vec<usize>>,
    pub segment_len: usize,
}

impl Layout {
    pub fn new(k: usize, r: usize, s: usize) -> Self {
        Layout {
            parts: k - 1,
            arity: r - 1,
            block_size: s,
            index_sets: index_sets(k - 1, r - 1),
            segment_len: s.pow((r - 1) as u32),
        }
    }

    /// `L`
    pub fn len(&self) -> usize {
        self.index_sets.len() * self.segment_len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn segment_of(&self, parts: &[usize]) -> Option<usize> {
        self.index_sets
            .binary_search_by(|x| x.as_slice().cmp(parts))
            .ok()
    }

    /// Row-major offset of local coordinates inside a segment.
    pub fn local_offset(&self, local: &[usize]) -> usize {
        local.iter().fold(0, |acc, &x| acc * self.block_size + x)
    }

    pub fn bit(&self, segment: usize, local: &[usize]) -> usize {
        segment * self.segment_len + self.local_offset(local)
    }

    fn unpack(&self, bit: usize) -> (usize, Vec<usize>) {
        let seg = bit / self.segment_len;
        let mut rest = bit % self.segment_len;
        let mut local = vec![0; self.arity];
        for slot in local.iter_mut().rev() {
            *slot = rest % self.block_size;
            rest /= self.block_size;
        }
        (seg, local)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactRep {
    pub bits: Vec<u64>,
    pub len: usize,
    /// `j`, one block index per part of the `(k-1)`-partite hypergraph.
    pub block_tuple: Vec<usize>,
}

impl CompactRep {
    pub fn zeros(len: usize, block_tuple: Vec<usize>) -> Self {
        CompactRep {
            bits: vec![0; len.div_ceil(64)],
            len,
            block_tuple,
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    /// The whole string as one word, when `L ≤ 64`.
    pub fn as_u64(&self) -> Option<u64> {
        match self.bits.len() {
            0 => Some(0),
            1 => Some(self.bits[0]),
            _ => None,
        }
    }
}

/// Encodes `hsub`, which must be a `(k-1)`-partite `(r-1)`-uniform
/// hypergraph whose hyperedges all lie inside block tuple `j`.
pub fn encode_compact(
    hsub: &UniformHypergraph,
    params: &HypercliqueParams,
    j: &[usize],
) -> Result<CompactRep> {
    let layout = params.layout();
    if hsub.k() != layout.parts || hsub.r() != layout.arity || j.len() != layout.parts {
        return invalid(format!(
            "expected a {}-partite {}-uniform hypergraph and a {}-entry block tuple",
            layout.parts, layout.arity, layout.parts
        ));
    }
    let s = layout.block_size;
    let mut rep = CompactRep::zeros(layout.len(), j.to_vec());
    let mut parts = Vec::with_capacity(layout.arity);
    let mut local = Vec::with_capacity(layout.arity);
    for e in hsub.edges() {
        parts.clear();
        local.clear();
        for &u in e {
            let p = hsub.part_of(u);
            let off = u - hsub.part_offset(p);
            if off / s != j[p] {
                return invalid(format!(
                    "vertex {u} lies outside block {} of part {p}",
                    j[p]
                ));
            }
            parts.push(p);
            local.push(off % s);
        }
        let seg = layout
            .segment_of(&parts)
            .expect("hyperedge parts form an index set");
        rep.set(layout.bit(seg, &local));
    }
    Ok(rep)
}

/// Inverse of [`encode_compact`] for a hypergraph with the given part sizes.
pub fn decode_compact(
    rep: &CompactRep,
    params: &HypercliqueParams,
    part_sizes: &[usize],
) -> Result<UniformHypergraph> {
    let layout = params.layout();
    if rep.len != layout.len()
        || part_sizes.len() != layout.parts
        || rep.block_tuple.len() != layout.parts
    {
        return invalid("representation does not match the parameters");
    }
    let offsets: Vec<usize> = part_sizes
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect();
    let s = layout.block_size;
    let mut edges = Vec::new();
    for (w, &word) in rep.bits.iter().enumerate() {
        for b in crate::bits::word_ones(word) {
            let bit = w * 64 + b;
            if bit >= rep.len {
                return Err(Error::InternalInconsistency(format!(
                    "bit {bit} beyond L = {}",
                    rep.len
                )));
            }
            let (seg, local) = layout.unpack(bit);
            let mut e = Vec::with_capacity(layout.arity);
            for (&p, &x) in layout.index_sets[seg].iter().zip(&local) {
                let within = rep.block_tuple[p] * s + x;
                if within >= part_sizes[p] {
                    return Err(Error::InternalInconsistency(format!(
                        "padding bit {bit} is set"
                    )));
                }
                e.push(offsets[p] + within);
            }
            edges.push(e);
        }
    }
    UniformHypergraph::new(layout.arity, part_sizes.to_vec(), edges)
}

/// Blocks per part of the `(k-1)` non-pivot parts of `h`.
pub(crate) fn blocks_per_part(h: &UniformHypergraph, s: usize) -> Vec<usize> {
    (1..h.k()).map(|p| h.part_sizes()[p].div_ceil(s)).collect()
}

/// Mixed-radix code of a tuple of block indices.
pub(crate) fn tuple_code(
    tuple: impl IntoIterator<Item = usize>,
    radices: impl IntoIterator<Item = usize>,
) -> usize {
    tuple
        .into_iter()
        .zip(radices)
        .fold(0, |acc, (x, r)| acc * r + x)
}

/// Segments of every `G_v^j` indexed by `(v, I, j_I)`, so a full
/// representation is a concatenation of `C(k-1, r-1)` cached words.
#[derive(Clone, Debug)]
pub struct SegmentCache {
    layout: Layout,
    blocks: Vec<usize>,
    /// Start of segment `I` inside one vertex's slice.
    seg_start: Vec<usize>,
    per_vertex: usize,
    words: Vec<u64>,
}

impl SegmentCache {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    fn slot(&self, v: usize, seg: usize, j_i: usize) -> usize {
        v * self.per_vertex + self.seg_start[seg] + j_i
    }

    fn j_code(&self, seg: usize, j: &[usize]) -> usize {
        let set = &self.layout.index_sets[seg];
        tuple_code(
            set.iter().map(|&p| j[p]),
            set.iter().map(|&p| self.blocks[p]),
        )
    }

    /// One segment of `G_v^j` (`v` counted from the start of part 0).
    pub fn segment(&self, v: usize, seg: usize, j: &[usize]) -> u64 {
        self.words[self.slot(v, seg, self.j_code(seg, j))]
    }

    /// The full representation of `G_v^j` as one word.
    pub fn rep(&self, v: usize, j: &[usize]) -> u64 {
        let mut out = 0u64;
        for seg in 0..self.layout.index_sets.len() {
            out |= self.segment(v, seg, j) << (seg * self.layout.segment_len);
        }
        out
    }
}

/// Builds the segment cache for every `v ∈ V1`. Requires `L ≤ 64`.
pub fn compress_all(h: &UniformHypergraph, params: &HypercliqueParams) -> Result<SegmentCache> {
    if h.k() != params.k || h.r() != params.r {
        return invalid(format!(
            "parameters are for k = {}, r = {}; hypergraph has k = {}, r = {}",
            params.k,
            params.r,
            h.k(),
            h.r()
        ));
    }
    let layout = params.layout();
    if layout.len() > 64 {
        return Err(Error::ResourceLimit {
            what: "compact representation (bits per word)".into(),
            required: layout.len() as u128,
            limit: 64,
        });
    }
    let s = layout.block_size;
    let blocks = blocks_per_part(h, s);
    let mut seg_start = Vec::with_capacity(layout.index_sets.len());
    let mut per_vertex = 0;
    for set in &layout.index_sets {
        seg_start.push(per_vertex);
        per_vertex += set.iter().map(|&p| blocks[p]).product::<usize>();
    }
    let n0 = h.part_sizes()[0];
    let mut cache = SegmentCache {
        layout,
        blocks,
        seg_start,
        per_vertex,
        words: vec![0; n0 * per_vertex],
    };
    let mut parts = Vec::with_capacity(params.r - 1);
    let mut js = Vec::with_capacity(params.r - 1);
    let mut local = Vec::with_capacity(params.r - 1);
    for e in h.edges() {
        if h.part_of(e[0]) != 0 {
            continue;
        }
        parts.clear();
        js.clear();
        local.clear();
        for &u in &e[1..] {
            // G_v numbers the remaining parts from zero
            let p = h.part_of(u);
            let off = u - h.part_offset(p);
            parts.push(p - 1);
            js.push(off / s);
            local.push(off % s);
        }
        let seg = cache
            .layout
            .segment_of(&parts)
            .expect("hyperedge parts form an index set");
        let code = tuple_code(js.iter().copied(), parts.iter().map(|&p| cache.blocks[p]));
        let bit = cache.layout.local_offset(&local);
        let slot = cache.slot(e[0], seg, code);
        cache.words[slot] |= 1 << bit;
    }
    Ok(cache)
}

/// `G_v^j`: the adjacency hypergraph of `v` restricted to block tuple `j`.
pub fn restrict_to_blocks(
    gv: &UniformHypergraph,
    s: usize,
    j: &[usize],
) -> Result<UniformHypergraph> {
    let inside = |u: usize| {
        let p = gv.part_of(u);
        (u - gv.part_offset(p)) / s == j[p]
    };
    let edges = gv
        .edges()
        .iter()
        .filter(|e| e.iter().all(|&u| inside(u)))
        .cloned();
    UniformHypergraph::new(gv.r(), gv.part_sizes().to_vec(), edges)
}
