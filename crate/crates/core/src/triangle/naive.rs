use super::require_three_parts;
use crate::bits;
use crate::error::Result;
use crate::graph::KPartiteGraph;
use crate::witness::Triangle;

/// For each edge `(v2, v3)`, tests `N_1(v2) ∩ N_1(v3) ≠ ∅` with word ANDs.
pub fn detect_naive(g: &KPartiteGraph) -> Result<Option<Triangle>> {
    require_three_parts(g)?;
    let v1 = g.part_range(0);
    if v1.is_empty() {
        return Ok(None);
    }
    for b in g.part_range(1) {
        let row_b = g.row(b);
        for c in bits::ones_in(row_b, g.part_range(2)) {
            if let Some(a) = bits::first_common_in(row_b, g.row(c), v1.clone()) {
                return Ok(Some([a, b, c]));
            }
        }
    }
    Ok(None)
}

/// Scalar triple loop with one adjacency probe per pair; the benchmark baseline.
pub fn detect_scalar_reference(g: &KPartiteGraph) -> Result<Option<Triangle>> {
    require_three_parts(g)?;
    for a in g.part_range(0) {
        for b in g.part_range(1) {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in g.part_range(2) {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    return Ok(Some([a, b, c]));
                }
            }
        }
    }
    Ok(None)
}
