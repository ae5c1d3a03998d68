use super::require_three_parts;
use crate::bits::{self, word_ones};
use crate::budget::{check_index_bits, TableBudget};
use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use serde::Serialize;
use std::ops::Range;

/// Upper bound on `log2` of the entry count of one block-pair table.
pub const DEFAULT_MAX_INDEX_BITS: u32 = 26;

const BLOCK_FRACTION: f64 = 0.25;
/// Listing-mode entries are `b × b` edge masks packed into one word.
const MAX_LIST_BLOCK: usize = 8;

/// Contiguous blocks of one part; all but the last have `block_size` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockScheme {
    pub part: usize,
    pub block_size: usize,
    pub blocks: Vec<Range<usize>>,
}

impl BlockScheme {
    pub fn new(g: &KPartiteGraph, part: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return invalid("block size must be at least 1");
        }
        Ok(Self::over_range(part, g.part_range(part), block_size))
    }

    pub(crate) fn over_range(part: usize, range: Range<usize>, block_size: usize) -> Self {
        let blocks = range
            .clone()
            .step_by(block_size)
            .map(|start| start..(start + block_size).min(range.end))
            .collect();
        BlockScheme {
            part,
            block_size,
            blocks,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableMode {
    Detect,
    List,
}

/// For every `(V2-block i, V3-block j)` and every pair of subset masks
/// `(S, T)`: whether an edge joins `S` and `T` (detect mode) or exactly which
/// pairs of `S × T` are edges (list mode).
///
/// Mask bit `x` of a block stands for vertex `block.start + x`; the entry
/// index within a pair is `S | T << b`.
#[derive(Clone, Debug)]
pub struct BlockEdgeTable {
    block_size: usize,
    mode: TableMode,
    v2: BlockScheme,
    v3: BlockScheme,
    fingerprint: u64,
    entries_per_pair: usize,
    flags: Vec<u64>,
    edge_masks: Vec<u64>,
}

/// Bytes a table with block size `b` would occupy on `g`.
fn table_bytes(g: &KPartiteGraph, b: usize, mode: TableMode) -> u128 {
    let pairs = (g.part_size(1).div_ceil(b) * g.part_size(2).div_ceil(b)) as u128;
    let entries = 1u128 << (2 * b);
    match mode {
        TableMode::Detect => pairs * entries.div_ceil(64) * 8,
        TableMode::List => pairs * entries * 8,
    }
}

/// `max(1, ⌊0.25 · log2 n⌋)`, lowered until the table fits both guards.
pub fn default_block_size(
    g: &KPartiteGraph,
    mode: TableMode,
    max_index_bits: u32,
    budget: TableBudget,
) -> usize {
    let log_n = (g.n().max(2) as f64).log2();
    let mut b = ((BLOCK_FRACTION * log_n).floor() as usize).max(1);
    if mode == TableMode::List {
        b = b.min(MAX_LIST_BLOCK);
    }
    b = b.min((max_index_bits / 2).max(1) as usize);
    while b > 1 && !budget.allows(table_bytes(g, b, mode)) {
        b -= 1;
    }
    b
}

impl BlockEdgeTable {
    pub fn build(
        g: &KPartiteGraph,
        block_size: usize,
        mode: TableMode,
        max_index_bits: u32,
        budget: TableBudget,
    ) -> Result<Self> {
        require_three_parts(g)?;
        if block_size == 0 {
            return invalid("block size must be at least 1");
        }
        check_index_bits("block edge table", 2 * block_size as u32, max_index_bits)?;
        if mode == TableMode::List && block_size > MAX_LIST_BLOCK {
            return invalid(format!(
                "listing-mode block size {block_size} exceeds {MAX_LIST_BLOCK}"
            ));
        }
        budget.check("block edge table", table_bytes(g, block_size, mode))?;

        let b = block_size;
        let v2 = BlockScheme::new(g, 1, b)?;
        let v3 = BlockScheme::new(g, 2, b)?;
        let entries_per_pair = 1usize << (2 * b);
        let pairs = v2.len() * v3.len();
        let mut flags = Vec::new();
        let mut edge_masks = Vec::new();
        match mode {
            TableMode::Detect => flags = vec![0u64; pairs * entries_per_pair.div_ceil(64)],
            TableMode::List => edge_masks = vec![0u64; pairs * entries_per_pair],
        }
        let words = entries_per_pair.div_ceil(64);
        let subsets = 1usize << b;
        let mut union = vec![0u64; subsets];
        for (i, bi) in v2.blocks.iter().enumerate() {
            for (j, bj) in v3.blocks.iter().enumerate() {
                let pair = i * v3.len() + j;
                let local: Vec<u64> = bi
                    .clone()
                    .map(|u| bits::extract_bits(g.row(u), bj.start, bj.len()))
                    .collect();
                match mode {
                    TableMode::Detect => {
                        let out = &mut flags[pair * words..(pair + 1) * words];
                        union[0] = 0;
                        for s in 1..subsets {
                            let low = s.trailing_zeros() as usize;
                            let nbr = local.get(low).copied().unwrap_or(0);
                            union[s] = union[s & (s - 1)] | nbr;
                        }
                        for (s, &reach) in union.iter().enumerate() {
                            if reach == 0 {
                                continue;
                            }
                            for t in 1..subsets {
                                if reach & t as u64 != 0 {
                                    let idx = s | t << b;
                                    out[idx / 64] |= 1 << (idx % 64);
                                }
                            }
                        }
                    }
                    TableMode::List => {
                        let out =
                            &mut edge_masks[pair * entries_per_pair..(pair + 1) * entries_per_pair];
                        for s in 1..subsets {
                            for t in 1..subsets {
                                let mut m = 0u64;
                                for a in word_ones(s as u64) {
                                    let hits = local.get(a).copied().unwrap_or(0) & t as u64;
                                    m |= hits << (a * b);
                                }
                                out[s | t << b] = m;
                            }
                        }
                    }
                }
            }
        }
        Ok(BlockEdgeTable {
            block_size: b,
            mode,
            v2,
            v3,
            fingerprint: g.fingerprint(),
            entries_per_pair,
            flags,
            edge_masks,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn v2_blocks(&self) -> &BlockScheme {
        &self.v2
    }

    pub fn v3_blocks(&self) -> &BlockScheme {
        &self.v3
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn bytes(&self) -> usize {
        (self.flags.len() + self.edge_masks.len()) * 8
    }

    #[inline]
    fn index(&self, i: usize, j: usize, s: u64, t: u64) -> usize {
        (i * self.v3.len() + j) * self.entries_per_pair + (s | t << self.block_size) as usize
    }

    /// Is there an edge between mask `s` of V2-block `i` and mask `t` of V3-block `j`?
    #[inline]
    pub fn has_edge_between(&self, i: usize, j: usize, s: u64, t: u64) -> bool {
        match self.mode {
            TableMode::Detect => {
                let words = self.entries_per_pair.div_ceil(64);
                let local = (s | t << self.block_size) as usize;
                let pair = i * self.v3.len() + j;
                (self.flags[pair * words + local / 64] >> (local % 64)) & 1 == 1
            }
            TableMode::List => self.edge_masks[self.index(i, j, s, t)] != 0,
        }
    }

    /// Stored edges between the two masks as global `(v2, v3)` pairs.
    /// Empty in detect mode.
    pub fn edges_between(
        &self,
        i: usize,
        j: usize,
        s: u64,
        t: u64,
    ) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = match self.mode {
            TableMode::List => self.edge_masks[self.index(i, j, s, t)],
            TableMode::Detect => 0,
        };
        let b = self.block_size;
        let (si, tj) = (self.v2.blocks[i].start, self.v3.blocks[j].start);
        word_ones(m).map(move |bit| (si + bit / b, tj + bit % b))
    }
}
