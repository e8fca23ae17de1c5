//! Node characterization: packets → basic flows → activity flows → feature
//! vectors.

mod aggregate;
pub mod csvio;
pub mod features;
pub mod ingest;
mod noflow;
mod packet;
pub mod scale;

use thiserror::Error;

pub use aggregate::{
    dedupe_mixed_attackers, group_activity_flows, group_basic_flows, known_endpoints, ActivityFlow,
    BasicFlow,
};
pub use features::{FeatureVector, FEATURE_NAMES, N_FEATURES};
pub use noflow::{synthesize_noflow_nodes, NoflowMode, NoflowSynthesis, LOW_PROFILE_MAX_FLOWS};
pub use packet::{BinaryClass, Endpoint, FlowKey, Label, MacAddr, PacketRecord, Protocol};
pub use scale::{Scaling, Standardizer};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("column {position}: expected `{expected}`, found `{found}`")]
    Schema {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
