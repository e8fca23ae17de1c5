use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::features::{basic_flow_features, FeatureVector, DISTINCT_DST_PORTS, N_FEATURES};
use super::{Endpoint, FlowKey, Label, PacketRecord};

/// Packets sharing one directed `src:port → dst:port` key, summarized by
/// their averaged attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicFlow {
    pub key: FlowKey,
    pub features: FeatureVector,
    pub packet_count: usize,
    pub label: Label,
}

/// All basic flows leaving one `src:port`; becomes one graph node.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityFlow {
    pub source: Endpoint,
    pub features: FeatureVector,
    /// Zero for synthesized no-flow nodes.
    pub basic_flow_count: usize,
    pub label: Label,
}

/// Groups packets by directed flow key. Output is sorted by key.
pub fn group_basic_flows(packets: &[PacketRecord]) -> Vec<BasicFlow> {
    /// Arrival times with payload sizes, and per-label packet counts.
    type Group = (Vec<(f64, u32)>, [usize; 8]);
    let mut groups: HashMap<FlowKey, Group> = HashMap::new();
    for p in packets {
        let entry = groups
            .entry(p.key())
            .or_insert_with(|| (Vec::new(), [0; 8]));
        entry.0.push((p.timestamp, p.payload_bytes));
        entry.1[p.label.index()] += 1;
    }
    let mut flows: Vec<BasicFlow> = groups
        .into_iter()
        .map(|(key, (pkts, counts))| BasicFlow {
            key,
            features: basic_flow_features(&pkts),
            packet_count: pkts.len(),
            label: majority_from_counts(&counts),
        })
        .collect();
    flows.sort_by_key(|f| f.key);
    flows
}

fn majority_from_counts(counts: &[usize; 8]) -> Label {
    Label::majority(
        Label::ALL
            .iter()
            .flat_map(|l| std::iter::repeat_n(*l, counts[l.index()])),
    )
    .expect("at least one packet")
}

/// Groups basic flows by source endpoint and mean-aggregates their vectors.
/// `distinct_dst_ports` becomes the number of distinct destination
/// endpoints. Output is sorted by source.
pub fn group_activity_flows(basic: &[BasicFlow]) -> Vec<ActivityFlow> {
    let mut groups: BTreeMap<Endpoint, Vec<&BasicFlow>> = BTreeMap::new();
    for f in basic {
        groups.entry(f.key.src()).or_default().push(f);
    }
    groups
        .into_iter()
        .map(|(source, mut members)| {
            members.sort_by_key(|f| f.key);
            let mut features = [0.0; N_FEATURES];
            for m in &members {
                for (acc, x) in features.iter_mut().zip(m.features.iter()) {
                    *acc += x;
                }
            }
            let k = members.len() as f64;
            for x in &mut features {
                *x /= k;
            }
            let dsts: BTreeSet<Endpoint> = members.iter().map(|m| m.key.dst()).collect();
            features[DISTINCT_DST_PORTS] = dsts.len() as f64;
            ActivityFlow {
                source,
                features,
                basic_flow_count: members.len(),
                label: Label::majority(members.iter().map(|m| m.label)).expect("non-empty group"),
            }
        })
        .collect()
}

/// Drops the DDoS-family flows of every source endpoint that also carries
/// PortScan flows, so each attacker source maps to a single attack class.
pub fn dedupe_mixed_attackers(flows: &[BasicFlow]) -> Vec<BasicFlow> {
    let mut scanners: BTreeSet<Endpoint> = BTreeSet::new();
    let mut flooders: BTreeSet<Endpoint> = BTreeSet::new();
    for f in flows {
        if f.label == Label::PortScan {
            scanners.insert(f.key.src());
        } else if f.label.is_ddos_family() {
            flooders.insert(f.key.src());
        }
    }
    let mixed: BTreeSet<&Endpoint> = scanners.intersection(&flooders).collect();
    flows
        .iter()
        .filter(|f| !(f.label.is_ddos_family() && mixed.contains(&f.key.src())))
        .cloned()
        .collect()
}

/// Every endpoint that appears as a source or destination of `basic`.
pub fn known_endpoints(basic: &[BasicFlow]) -> BTreeSet<Endpoint> {
    basic
        .iter()
        .flat_map(|f| [f.key.src(), f.key.dst()])
        .collect()
}
