use super::{require_three_parts, BlockEdgeTable};
use crate::bits::{self, word_ones};
use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use crate::witness::Triangle;

/// Non-empty `(block index, mask)` pieces of `N(v)` over a block scheme.
fn block_masks(row: &[u64], blocks: &[std::ops::Range<usize>], out: &mut Vec<(usize, u64)>) {
    out.clear();
    for (i, b) in blocks.iter().enumerate() {
        let m = bits::extract_bits(row, b.start, b.len());
        if m != 0 {
            out.push((i, m));
        }
    }
}

/// Splits `N_2(v)` and `N_3(v)` into per-block masks and asks the table
/// whether any mask pair is joined by an edge. Scan order: `v` ascending,
/// then block pair, then the witness pair inside the hit.
pub fn detect_four_russians(g: &KPartiteGraph, table: &BlockEdgeTable) -> Result<Option<Triangle>> {
    require_three_parts(g)?;
    if table.fingerprint() != g.fingerprint() {
        return invalid("block edge table was built from a different graph");
    }
    let v2 = &table.v2_blocks().blocks;
    let v3 = &table.v3_blocks().blocks;
    let (mut m2, mut m3) = (Vec::new(), Vec::new());
    for a in g.part_range(0) {
        let row = g.row(a);
        block_masks(row, v2, &mut m2);
        if m2.is_empty() {
            continue;
        }
        block_masks(row, v3, &mut m3);
        for &(i, s) in &m2 {
            for &(j, t) in &m3 {
                if table.has_edge_between(i, j, s, t) {
                    for x in word_ones(s) {
                        let b = v2[i].start + x;
                        for y in word_ones(t) {
                            let c = v3[j].start + y;
                            if g.has_edge(b, c) {
                                return Ok(Some([a, b, c]));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
