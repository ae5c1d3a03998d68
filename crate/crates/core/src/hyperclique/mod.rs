//! k-hyperclique listing in k-partite r-uniform hypergraphs.
//!
//! `(v_1, …, v_k)` is a hyperclique iff `(v_2, …, v_k)` is a hyperclique of
//! both the adjacency hypergraph `G_{v_1}` and of `H` restricted to the other
//! parts. The second half is tabulated per block tuple of side `s` for every
//! possible compact representation of the first half.

mod compact;
mod tables;

pub use compact::{
    compress_all, decode_compact, encode_compact, index_sets, restrict_to_blocks, CompactRep,
    Layout, SegmentCache,
};
pub use tables::{build_tables, HypercliqueMode, HypercliqueTables};

use crate::budget::TableBudget;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::UniformHypergraph;
use crate::witness::{Collector, ListingResult};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_TABLE_BITS: u32 = 22;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypercliqueParams {
    pub k: usize,
    pub r: usize,
    /// `s`
    pub s: usize,
    /// `L = C(k-1, r-1) · s^{r-1}`
    pub l: usize,
    pub max_table_bits: u32,
}

impl HypercliqueParams {
    /// Explicit block size; the table guard is enforced when tables are built.
    pub fn with_block_size(k: usize, r: usize, s: usize, max_table_bits: u32) -> Result<Self> {
        if r < 2 || r >= k {
            return invalid(format!("need 2 <= r < k, got r = {r}, k = {k}"));
        }
        if s == 0 {
            return invalid("block size must be at least 1");
        }
        let l = binomial(k - 1, r - 1).saturating_mul(s.saturating_pow((r - 1) as u32));
        Ok(HypercliqueParams {
            k,
            r,
            s,
            l,
            max_table_bits,
        })
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.k, self.r, self.s)
    }

    pub fn segments(&self) -> usize {
        binomial(self.k - 1, self.r - 1)
    }
}

/// `(log2 n / (2 C(k-1, r-1)))^{1/(r-1)}` before any rounding.
pub fn real_block_size(log2_n: f64, k: usize, r: usize) -> f64 {
    (log2_n / (2.0 * binomial(k - 1, r - 1) as f64)).powf(1.0 / (r - 1) as f64)
}

/// [`choose_block_size`] for a given `log2 n`.
pub fn choose_block_size_log2(
    log2_n: f64,
    k: usize,
    r: usize,
    max_table_bits: u32,
) -> Result<HypercliqueParams> {
    let c = HypercliqueParams::with_block_size(k, r, 1, max_table_bits)?.l;
    if c > max_table_bits as usize {
        return Err(Error::ResourceLimit {
            what: "hyperclique representation length at s = 1 (bits)".into(),
            required: c as u128,
            limit: max_table_bits as u128,
        });
    }
    let cap = ((log2_n / 2.0).ceil() as usize).min(max_table_bits as usize);
    let mut s = (real_block_size(log2_n, k, r).floor() as usize).max(1);
    loop {
        let p = HypercliqueParams::with_block_size(k, r, s, max_table_bits)?;
        if s == 1 || p.l <= cap {
            return Ok(p);
        }
        s -= 1;
    }
}

/// `s = max(1, ⌊formula⌋)`, lowered until `L ≤ min(⌈½ log2 n⌉, max_table_bits)`.
pub fn choose_block_size(
    n: usize,
    k: usize,
    r: usize,
    max_table_bits: u32,
) -> Result<HypercliqueParams> {
    choose_block_size_log2((n.max(2) as f64).log2(), k, r, max_table_bits)
}

fn check_input(h: &UniformHypergraph, k: usize) -> Result<()> {
    if h.k() != k {
        return invalid(format!("hypergraph has {} parts, expected k = {k}", h.k()));
    }
    if h.r() < 2 || h.r() >= k {
        return invalid(format!("need 2 <= r < k, got r = {}, k = {k}", h.r()));
    }
    Ok(())
}

fn run(
    h: &UniformHypergraph,
    params: &HypercliqueParams,
    tables: &HypercliqueTables,
    out: &mut Collector,
) -> Result<()> {
    let cache = compress_all(h, params)?;
    let live: Vec<(usize, Vec<usize>)> = tables.live_blocks().collect();
    let mut tuple = Vec::with_capacity(params.k);
    for (local_v, v) in h.part_range(0).enumerate() {
        for (code, j) in &live {
            let rep = cache.rep(local_v, j);
            if !tables.hit(*code, rep) {
                continue;
            }
            for w in tables.witnesses(*code, rep) {
                tuple.clear();
                tuple.push(v);
                tuple.extend_from_slice(w);
                if out.push(&tuple).is_break() {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// Lists up to `t` hypercliques with explicit parameters and memory budget.
pub fn list_hypercliques_with(
    h: &UniformHypergraph,
    t: Option<usize>,
    params: &HypercliqueParams,
    budget: TableBudget,
) -> Result<ListingResult> {
    check_input(h, params.k)?;
    let mut out = Collector::new(t);
    if !h.part_sizes().contains(&0) {
        let tables = build_tables(h, params, HypercliqueMode::List, budget)?;
        run(h, params, &tables, &mut out)?;
    }
    Ok(out.finish())
}

pub fn list_hypercliques(
    h: &UniformHypergraph,
    k: usize,
    t: Option<usize>,
) -> Result<ListingResult> {
    check_input(h, k)?;
    let params = choose_block_size(h.n(), k, h.r(), DEFAULT_MAX_TABLE_BITS)?;
    list_hypercliques_with(h, t, &params, TableBudget::default())
}

/// Detect-mode tables answer the `t = 1` question without witness lists.
pub fn detect_hyperclique_with(
    h: &UniformHypergraph,
    params: &HypercliqueParams,
    budget: TableBudget,
) -> Result<bool> {
    check_input(h, params.k)?;
    if h.part_sizes().contains(&0) {
        return Ok(false);
    }
    let tables = build_tables(h, params, HypercliqueMode::Detect, budget)?;
    let cache = compress_all(h, params)?;
    let live: Vec<(usize, Vec<usize>)> = tables.live_blocks().collect();
    for v in 0..h.part_sizes()[0] {
        if live
            .iter()
            .any(|(code, j)| tables.hit(*code, cache.rep(v, j)))
        {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn detect_hyperclique(h: &UniformHypergraph, k: usize) -> Result<bool> {
    check_input(h, k)?;
    let params = choose_block_size(h.n(), k, h.r(), DEFAULT_MAX_TABLE_BITS)?;
    detect_hyperclique_with(h, &params, TableBudget::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_hypercliques;

    #[test]
    fn block_size_examples() {
        let p = choose_block_size_log2(96.0, 4, 3, 64).unwrap();
        assert_eq!((p.s, p.l), (4, 48));
        let p = choose_block_size_log2(96.0, 4, 2, 64).unwrap();
        assert_eq!((p.s, p.l), (16, 48));
        let p = choose_block_size(256, 4, 3, 22).unwrap();
        assert_eq!((p.s, p.l), (1, 3));
        assert!(matches!(
            choose_block_size(256, 8, 4, 22),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(choose_block_size(256, 3, 3, 22).is_err());
    }

    #[test]
    fn complete_sixteen_and_threshold() {
        let h = UniformHypergraph::complete(3, vec![2, 2, 2, 2]).unwrap();
        assert_eq!(list_hypercliques(&h, 4, None).unwrap().len(), 16);
        let five = list_hypercliques(&h, 4, Some(5)).unwrap();
        assert_eq!(five.len(), 5);
        assert!(five.truncated);
        assert!(detect_hyperclique(&h, 4).unwrap());
        let e = UniformHypergraph::new(3, vec![2, 2, 2, 2], []).unwrap();
        assert!(!detect_hyperclique(&e, 4).unwrap());
    }

    #[test]
    fn missing_hyperedge_with_larger_blocks() {
        let h = UniformHypergraph::complete(3, vec![3, 3, 3, 3]).unwrap();
        let mut edges = h.edges().to_vec();
        edges.retain(|e| e != &vec![1, 4, 7]);
        let h = UniformHypergraph::new(3, vec![3, 3, 3, 3], edges).unwrap();
        for s in 1..=2 {
            let p = HypercliqueParams::with_block_size(4, 3, s, 22).unwrap();
            let got = list_hypercliques_with(&h, None, &p, TableBudget::default()).unwrap();
            assert_eq!(
                got.witnesses,
                brute_hypercliques(&h, 4, None).unwrap().witnesses
            );
            assert_eq!(got.len(), 81 - 3);
        }
    }
}
