//! Two-layer detect/identify architecture, dataset splits, the random
//! forest baseline and metrics.

mod experiment;
pub mod forest;
mod metrics;
pub mod report;
mod split;

use thiserror::Error;

pub use experiment::{
    characterize_flows, characterize_packets, detect, identify, propagation_graph, run_two_layer,
    vary_training_size, Dataset, Detection, Identification, ModelKind, PipelineConfig, SizeRow,
    TwoLayerOutcome,
};
pub use forest::{ForestConfig, RandomForest};
pub use metrics::{evaluate, Averaging, Metrics};
pub use report::{ExperimentReport, MetricRow};
pub use split::{split, Masks, SplitSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("split: {0}")]
    Split(String),
    #[error("evaluation: {0}")]
    Evaluation(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("characterization: {0}")]
    Flow(#[from] crate::flowkit::FlowError),
    #[error("graph: {0}")]
    Graph(#[from] crate::netgraph::GraphError),
    #[error("{stage}: {source}")]
    Model {
        stage: &'static str,
        source: crate::gcn::GcnError,
    },
}
