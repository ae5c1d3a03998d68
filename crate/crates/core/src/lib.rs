//! Combinatorial triangle, k-clique and k-hyperclique detection and listing
//! on k-partite graphs and hypergraphs, with brute-force oracles and a small
//! workbench for generating, verifying and timing instances.

pub mod bits;
pub mod budget;
pub mod error;
pub mod graph;
pub mod hyperclique;
pub mod hypergraph;
pub mod kclique;
pub mod listing;
pub mod oracles;
pub mod regularity;
pub mod triangle;
pub mod witness;
pub mod workbench;

pub use budget::TableBudget;
pub use error::{Error, Result};
pub use graph::{GraphBuilder, KPartiteGraph, Subgraph};
pub use hypergraph::UniformHypergraph;
pub use witness::{ListingResult, Triangle};
