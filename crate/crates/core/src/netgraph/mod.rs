//! Traffic graph construction and the propagation operator fed to the GCN.

mod adjacency;
pub mod dump;
mod graph;
mod hyper;

use thiserror::Error;

use crate::flowkit::Endpoint;

pub use adjacency::{normalized_adjacency, Adjacency, NormalizedAdjacency};
pub use graph::{build_graph, TrafficGraph};
pub use hyper::{build_hypergraph, hypergraph_expand, HyperedgeGrouping, Hypergraph};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("endpoint {0} has no node; synthesize no-flow nodes first")]
    DanglingEndpoint(Endpoint),
    #[error("{0}")]
    Invalid(String),
}
