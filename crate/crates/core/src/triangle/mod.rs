//! Triangle detection and output-sensitive listing on tripartite graphs.
//!
//! Parts are indexed from zero: `V1`, `V2`, `V3` are parts 0, 1, 2.

mod block_table;
mod four_russians;
mod naive;
mod sparse;

pub use block_table::{
    default_block_size, BlockEdgeTable, BlockScheme, TableMode, DEFAULT_MAX_INDEX_BITS,
};
pub use four_russians::detect_four_russians;
pub use naive::{detect_naive, detect_scalar_reference};
pub use sparse::{
    list_sparse_four_russians, list_sparse_into, list_sparse_pivoted, list_sparse_pivoted_into,
    SparseFRParams, SubsetIndexer,
};

use crate::budget::TableBudget;
use crate::error::{invalid, Result};
use crate::graph::KPartiteGraph;
use crate::witness::Triangle;

pub(crate) fn require_three_parts(g: &KPartiteGraph) -> Result<()> {
    if g.k() != 3 {
        return invalid(format!("expected a tripartite graph, got {} parts", g.k()));
    }
    Ok(())
}

/// A triangle decision procedure pluggable into the k-clique reduction.
pub trait TriangleDetector: Sync {
    fn name(&self) -> &'static str;
    fn detect(&self, g: &KPartiteGraph) -> Result<Option<Triangle>>;
}

/// Word-parallel baseline: one AND of two rows per `V2 × V3` edge.
#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveDetector;

impl TriangleDetector for NaiveDetector {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn detect(&self, g: &KPartiteGraph) -> Result<Option<Triangle>> {
        detect_naive(g)
    }
}

/// Block-subset Four-Russians detection; builds a fresh table per call.
#[derive(Clone, Copy, Debug)]
pub struct FourRussiansDetector {
    /// `None` picks [`default_block_size`] for each instance.
    pub block_size: Option<usize>,
    pub max_index_bits: u32,
    pub budget: TableBudget,
}

impl Default for FourRussiansDetector {
    fn default() -> Self {
        FourRussiansDetector {
            block_size: None,
            max_index_bits: DEFAULT_MAX_INDEX_BITS,
            budget: TableBudget::default(),
        }
    }
}

impl TriangleDetector for FourRussiansDetector {
    fn name(&self) -> &'static str {
        "four-russians"
    }

    fn detect(&self, g: &KPartiteGraph) -> Result<Option<Triangle>> {
        require_three_parts(g)?;
        if g.part_sizes().contains(&0) {
            return Ok(None);
        }
        let b = match self.block_size {
            Some(b) => b,
            None => default_block_size(g, TableMode::Detect, self.max_index_bits, self.budget),
        };
        let table =
            BlockEdgeTable::build(g, b, TableMode::Detect, self.max_index_bits, self.budget)?;
        detect_four_russians(g, &table)
    }
}
