//! Exact triangle counting over edge streams.
//!
//! Two concurrent engines share the same input types: a dynamic pipeline of
//! filters that specialise themselves on a responsible node
//! ([`pipeline::run_pipeline`]), and a two-round MapReduce
//! ([`mapreduce::count_triangles_mapreduce`]). The [`oracle`] module holds the
//! sequential reference implementations both are checked against.

pub mod bench;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod mapreduce;
pub mod oracle;
pub mod pipeline;
pub mod source;

pub use error::{Error, Result};
pub use gen::{generate, GenMode, GenSpec};
pub use graph::{dedup_stream, edge_key, graph_stats, Edge, EdgeKey, GraphStats, NodeId};
pub use io::GraphFormat;
pub use mapreduce::{count_triangles_mapreduce, MrConfig, MrOutcome, PathTriple};
pub use oracle::{count_triangles_exact, Triangle};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutcome, Scheduling};
pub use source::{EdgeFile, EdgeSource};
