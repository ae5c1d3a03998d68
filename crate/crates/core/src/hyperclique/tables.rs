//! Per-block-tuple lookup tables over all `2^L` representations.
//!
//! For block tuple `j` the candidates are the `(k-1)`-hypercliques of `G^j`
//! (the hypergraph `H` restricted to `V^j`). Candidate `c` needs every
//! `(r-1)`-subset of itself to be present in `G_v^j`, which is one fixed mask
//! of representation bits; the entry for `rep` holds the candidates whose
//! mask is contained in `rep`.

use super::compact::{blocks_per_part, tuple_code, Layout};
use super::HypercliqueParams;
use crate::budget::{check_index_bits, TableBudget};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::UniformHypergraph;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypercliqueMode {
    Detect,
    List,
}

#[derive(Clone, Debug)]
struct BlockEntry {
    /// Global ids `(v_2, …, v_k)` of each candidate.
    candidates: Vec<Vec<usize>>,
    /// Words per entry: candidate bitmask words (list) or 0 (detect).
    words: usize,
    data: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct HypercliqueTables {
    params: HypercliqueParams,
    mode: HypercliqueMode,
    blocks: Vec<usize>,
    entries: Vec<Option<BlockEntry>>,
    bytes: u128,
}

fn block_tuples(blocks: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = blocks.iter().product();
    (0..total)
        .map(|mut code| {
            let mut t = vec![0; blocks.len()];
            for i in (0..blocks.len()).rev() {
                t[i] = code % blocks[i];
                code /= blocks[i];
            }
            t
        })
        .collect()
}

/// Tuples of `V^j` that are `(k-1)`-hypercliques in `H`.
fn candidates_of(h: &UniformHypergraph, layout: &Layout, j: &[usize]) -> Vec<Vec<usize>> {
    let s = layout.block_size;
    let ranges: Vec<std::ops::Range<usize>> = (0..layout.parts)
        .map(|p| {
            let part = h.part_range(p + 1);
            let start = part.start + j[p] * s;
            start..(start + s).min(part.end)
        })
        .collect();
    let subsets = super::compact::index_sets(layout.parts, layout.arity + 1);
    let mut out = Vec::new();
    let mut tuple = vec![0usize; layout.parts];
    let mut key = Vec::with_capacity(layout.arity + 1);
    fn go(
        h: &UniformHypergraph,
        depth: usize,
        ranges: &[std::ops::Range<usize>],
        subsets: &[Vec<usize>],
        tuple: &mut Vec<usize>,
        key: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == ranges.len() {
            out.push(tuple.clone());
            return;
        }
        for v in ranges[depth].clone() {
            tuple[depth] = v;
            // check the subsets whose largest position is `depth`
            let ok = subsets
                .iter()
                .filter(|set| *set.last().unwrap() == depth)
                .all(|set| {
                    key.clear();
                    key.extend(set.iter().map(|&p| tuple[p]));
                    h.contains_sorted(key)
                });
            if ok {
                go(h, depth + 1, ranges, subsets, tuple, key, out);
            }
        }
    }
    go(h, 0, &ranges, &subsets, &mut tuple, &mut key, &mut out);
    out
}

/// Representation bits a candidate needs.
fn required_mask(h: &UniformHypergraph, layout: &Layout, cand: &[usize]) -> u64 {
    let s = layout.block_size;
    let mut m = 0u64;
    let mut local = Vec::with_capacity(layout.arity);
    for (seg, set) in layout.index_sets.iter().enumerate() {
        local.clear();
        local.extend(set.iter().map(|&p| (cand[p] - h.part_offset(p + 1)) % s));
        m |= 1 << layout.bit(seg, &local);
    }
    m
}

/// Builds the table of every block tuple that has at least one candidate.
pub fn build_tables(
    h: &UniformHypergraph,
    params: &HypercliqueParams,
    mode: HypercliqueMode,
    budget: TableBudget,
) -> Result<HypercliqueTables> {
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
    let l = layout.len();
    check_index_bits("hyperclique table", l as u32, params.max_table_bits.min(63))?;
    let blocks = blocks_per_part(h, layout.block_size);
    let tuples = block_tuples(&blocks);
    let reps = 1usize << l;
    let mut entries = Vec::with_capacity(tuples.len());
    let mut bytes: u128 = 0;
    for j in &tuples {
        let candidates = candidates_of(h, &layout, j);
        if candidates.is_empty() {
            entries.push(None);
            continue;
        }
        let words = match mode {
            HypercliqueMode::List => candidates.len().div_ceil(64),
            HypercliqueMode::Detect => 0,
        };
        let len = match mode {
            HypercliqueMode::List => reps * words,
            HypercliqueMode::Detect => reps.div_ceil(64),
        };
        bytes += len as u128 * 8;
        if !budget.allows(bytes) {
            return Err(Error::ResourceLimit {
                what: "hyperclique tables (bytes)".into(),
                required: bytes,
                limit: budget.max_bytes as u128,
            });
        }
        let masks: Vec<u64> = candidates
            .iter()
            .map(|c| required_mask(h, &layout, c))
            .collect();
        let mut data = vec![0u64; len];
        for rep in 0..reps as u64 {
            for (ci, &m) in masks.iter().enumerate() {
                if m & !rep == 0 {
                    match mode {
                        HypercliqueMode::List => {
                            data[rep as usize * words + ci / 64] |= 1 << (ci % 64)
                        }
                        HypercliqueMode::Detect => {
                            data[rep as usize / 64] |= 1 << (rep % 64);
                            break;
                        }
                    }
                }
            }
        }
        entries.push(Some(BlockEntry {
            candidates,
            words,
            data,
        }));
    }
    Ok(HypercliqueTables {
        params: *params,
        mode,
        blocks,
        entries,
        bytes,
    })
}

impl HypercliqueTables {
    pub fn params(&self) -> &HypercliqueParams {
        &self.params
    }

    pub fn mode(&self) -> HypercliqueMode {
        self.mode
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn bytes(&self) -> u128 {
        self.bytes
    }

    pub fn block_code(&self, j: &[usize]) -> usize {
        tuple_code(j.iter().copied(), self.blocks.iter().copied())
    }

    /// Block tuples whose `G^j` has at least one candidate.
    pub fn live_blocks(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        let tuples = block_tuples(&self.blocks);
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some())
            .map(move |(code, _)| (code, tuples[code].clone()))
    }

    /// Does some `(v_2, …, v_k) ∈ V^j` form a hyperclique in both `G^j` and
    /// the hypergraph with representation `rep`?
    pub fn hit(&self, code: usize, rep: u64) -> bool {
        let Some(e) = &self.entries[code] else {
            return false;
        };
        match self.mode {
            HypercliqueMode::Detect => e.data[rep as usize / 64] >> (rep % 64) & 1 == 1,
            HypercliqueMode::List => e.data[rep as usize * e.words..][..e.words]
                .iter()
                .any(|&w| w != 0),
        }
    }

    /// The common hypercliques themselves; empty in detect mode.
    pub fn witnesses(&self, code: usize, rep: u64) -> impl Iterator<Item = &[usize]> + '_ {
        let (words, cands): (&[u64], &[Vec<usize>]) = match (&self.entries[code], self.mode) {
            (Some(e), HypercliqueMode::List) => {
                (&e.data[rep as usize * e.words..][..e.words], &e.candidates)
            }
            _ => (&[], &[]),
        };
        words
            .iter()
            .enumerate()
            .flat_map(|(w, &x)| crate::bits::word_ones(x).map(move |b| w * 64 + b))
            .map(move |i| cands[i].as_slice())
    }
}
