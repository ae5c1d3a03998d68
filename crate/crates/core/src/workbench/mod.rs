//! Generators, instance files, differential verification and benchmarks.

pub mod bench;
pub mod gen;
pub mod io;
pub mod verify;

pub use gen::{generate, GenKind, GenSpec, Instance};
pub use io::{parse_instance, read_instance, write_graph, write_hypergraph, write_instance};
