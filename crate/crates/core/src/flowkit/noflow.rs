use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, N_FEATURES};
use super::{ActivityFlow, Endpoint, Label};
use crate::rng;

/// Sources with at most this many basic flows form the low-profile benign
/// pool used for sampling.
pub const LOW_PROFILE_MAX_FLOWS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoflowMode {
    /// Draw each feature from the empirical distribution of low-profile
    /// benign sources.
    #[default]
    SampleBenign,
    Zeros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoflowSynthesis {
    pub nodes: Vec<ActivityFlow>,
    /// Set when `SampleBenign` found no qualifying benign source and zeros
    /// were used instead.
    pub fell_back_to_zeros: bool,
}

/// Emits a `NoflowBenign` node for every endpoint in `known` that has no
/// outgoing activity flow. Output is sorted by endpoint.
pub fn synthesize_noflow_nodes(
    known: &BTreeSet<Endpoint>,
    flows: &[ActivityFlow],
    mode: NoflowMode,
    seed: u64,
) -> NoflowSynthesis {
    let sources: HashSet<Endpoint> = flows.iter().map(|f| f.source).collect();
    let missing: Vec<Endpoint> = known
        .iter()
        .copied()
        .filter(|e| !sources.contains(e))
        .collect();

    let pool: Vec<&FeatureVector> = flows
        .iter()
        .filter(|f| f.label == Label::Benign && f.basic_flow_count <= LOW_PROFILE_MAX_FLOWS)
        .map(|f| &f.features)
        .collect();

    let fell_back = mode == NoflowMode::SampleBenign && pool.is_empty() && !missing.is_empty();
    let sample = mode == NoflowMode::SampleBenign && !pool.is_empty();
    let mut rng = rng::substream(seed, rng::stream::NOFLOW);

    let nodes = missing
        .into_iter()
        .map(|source| {
            let mut features = [0.0; N_FEATURES];
            if sample {
                for (i, x) in features.iter_mut().enumerate() {
                    *x = pool[rng.random_range(0..pool.len())][i];
                }
            }
            ActivityFlow {
                source,
                features,
                basic_flow_count: 0,
                label: Label::NoflowBenign,
            }
        })
        .collect();
    NoflowSynthesis {
        nodes,
        fell_back_to_zeros: fell_back,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::net::Ipv4Addr;

    fn ep(last: u8, port: u16) -> Endpoint {
        Endpoint::new(Ipv4Addr::new(10, 0, 0, last), port)
    }

    fn benign(source: Endpoint, v: FeatureVector, count: usize) -> ActivityFlow {
        ActivityFlow {
            source,
            features: v,
            basic_flow_count: count,
            label: Label::Benign,
        }
    }

    #[test]
    fn zeros_mode() {
        let known: BTreeSet<_> = [ep(1, 1), ep(2, 80)].into();
        let flows = vec![benign(ep(1, 1), [3.0; N_FEATURES], 1)];
        let out = synthesize_noflow_nodes(&known, &flows, NoflowMode::Zeros, 1);
        assert_eq!(out.nodes.len(), 1);
        assert_eq!(out.nodes[0].source, ep(2, 80));
        assert_eq!(out.nodes[0].features, [0.0; N_FEATURES]);
        assert_eq!(out.nodes[0].label, Label::NoflowBenign);
        assert_eq!(out.nodes[0].basic_flow_count, 0);
        assert!(!out.fell_back_to_zeros);
    }

    #[test]
    fn single_point_pool_is_copied() {
        let v: FeatureVector = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let known: BTreeSet<_> = [ep(1, 1), ep(2, 80), ep(3, 80)].into();
        let flows = vec![benign(ep(1, 1), v, 2)];
        let out = synthesize_noflow_nodes(&known, &flows, NoflowMode::SampleBenign, 9);
        assert_eq!(out.nodes.len(), 2);
        assert!(out.nodes.iter().all(|n| n.features == v));
    }

    #[test]
    fn high_profile_sources_excluded_and_fallback_flagged() {
        let known: BTreeSet<_> = [ep(1, 1), ep(2, 80)].into();
        let flows = vec![benign(ep(1, 1), [5.0; N_FEATURES], 3)];
        let out = synthesize_noflow_nodes(&known, &flows, NoflowMode::SampleBenign, 9);
        assert!(out.fell_back_to_zeros);
        assert_eq!(out.nodes[0].features, [0.0; N_FEATURES]);
    }

    #[test]
    fn seeded_determinism() {
        let known: BTreeSet<_> = (0..20)
            .map(|i| ep(i, 80))
            .chain([ep(100, 1), ep(101, 1)])
            .collect();
        let flows = vec![
            benign(ep(100, 1), [1.0; N_FEATURES], 1),
            benign(ep(101, 1), [2.0; N_FEATURES], 1),
        ];
        let a = synthesize_noflow_nodes(&known, &flows, NoflowMode::SampleBenign, 42);
        let b = synthesize_noflow_nodes(&known, &flows, NoflowMode::SampleBenign, 42);
        assert_eq!(a, b);
        // Per-feature independent draws mix values from both pool members.
        assert!(a
            .nodes
            .iter()
            .any(|n| n.features.contains(&1.0) && n.features.contains(&2.0)));
    }
}
