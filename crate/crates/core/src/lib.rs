//! Defense stack for packet-injection attacks on software-defined networks.
//!
//! The crate is organized as a pipeline:
//!
//! * [`trafficgen`] produces labeled packet traces (benign hosts plus slow, fast
//!   and discontinuous DDoS variants and port scans).
//! * [`flowkit`] turns packets into basic flows, activity flows and per-node
//!   feature vectors.
//! * [`netgraph`] builds the traffic graph (or a hypergraph expansion) and its
//!   renormalized adjacency operator.
//! * [`gcn`] is a dense two-or-more layer graph convolutional network trained by
//!   full-batch gradient descent.
//! * [`pipeline`] composes detection (benign vs attack) and identification
//!   (attack class) and carries the random-forest baseline and metrics.
//! * [`sdnsim`] is a discrete-event SDN simulator whose controller blocks
//!   attackers at the switches.
//! * [`cli`] wires everything into reproducible commands.

pub mod cli;
pub mod flowkit;
pub mod gcn;
pub mod netgraph;
pub mod pipeline;
pub mod rng;
pub mod sdnsim;
pub mod trafficgen;

pub use flowkit::{ActivityFlow, BasicFlow, FlowKey, Label, PacketRecord, Protocol};
pub use gcn::{GcnModel, Hyperparams};
pub use netgraph::{NormalizedAdjacency, TrafficGraph};
