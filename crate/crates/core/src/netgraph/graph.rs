use std::collections::HashMap;

use ndarray::Array2;

use super::{Adjacency, GraphError};
use crate::flowkit::{ActivityFlow, BasicFlow, Endpoint, Label, N_FEATURES};

/// Nodes, raw features, adjacency and labels of one traffic capture.
///
/// Nodes are sorted by `(ip, port)`; row `i` of `features` belongs to
/// `nodes[i]`.
#[derive(Debug, Clone)]
pub struct TrafficGraph {
    pub nodes: Vec<ActivityFlow>,
    pub features: Array2<f64>,
    pub adjacency: Adjacency,
    pub labels: Vec<Label>,
    pub train_mask: Vec<bool>,
    pub test_mask: Vec<bool>,
}

impl TrafficGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, endpoint: Endpoint) -> Option<usize> {
        self.nodes
            .binary_search_by_key(&endpoint, |n| n.source)
            .ok()
    }

    /// Replaces both masks; they must be disjoint and of length `n`.
    pub fn set_masks(&mut self, train: Vec<bool>, test: Vec<bool>) -> Result<(), GraphError> {
        if train.len() != self.n() || test.len() != self.n() {
            return Err(GraphError::Invalid(
                "mask length differs from node count".into(),
            ));
        }
        if let Some(i) = train.iter().zip(&test).position(|(a, b)| *a && *b) {
            return Err(GraphError::Invalid(format!(
                "node {i} is in both train and test masks"
            )));
        }
        self.train_mask = train;
        self.test_mask = test;
        Ok(())
    }

    /// The subgraph on `keep` (edges among kept nodes only), masks cleared.
    pub fn induced(&self, keep: &[usize]) -> TrafficGraph {
        TrafficGraph {
            nodes: keep.iter().map(|&i| self.nodes[i].clone()).collect(),
            features: self.features.select(ndarray::Axis(0), keep),
            adjacency: self.adjacency.induced(keep),
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            train_mask: vec![false; keep.len()],
            test_mask: vec![false; keep.len()],
        }
    }
}

/// One node per activity flow (sorted by endpoint); an unweighted edge
/// between two nodes whenever a basic flow connects their endpoints in
/// either direction.
///
/// Every basic-flow endpoint must be a node; destination-only endpoints have
/// to be synthesized beforehand.
pub fn build_graph(
    flows: &[ActivityFlow],
    basic: &[BasicFlow],
) -> Result<TrafficGraph, GraphError> {
    let mut nodes = flows.to_vec();
    nodes.sort_by_key(|f| f.source);
    if let Some(w) = nodes.windows(2).find(|w| w[0].source == w[1].source) {
        return Err(GraphError::Invalid(format!(
            "duplicate node {}",
            w[0].source
        )));
    }
    let index: HashMap<Endpoint, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, f)| (f.source, i))
        .collect();
    let lookup = |e: Endpoint| {
        index
            .get(&e)
            .copied()
            .ok_or(GraphError::DanglingEndpoint(e))
    };
    let mut edges = Vec::with_capacity(basic.len());
    for f in basic {
        let (s, d) = (lookup(f.key.src())?, lookup(f.key.dst())?);
        if s != d {
            edges.push((s, d));
        }
    }
    let n = nodes.len();
    let adjacency = Adjacency::from_edges(n, edges)?;
    let mut features = Array2::zeros((n, N_FEATURES));
    for (i, f) in nodes.iter().enumerate() {
        for (j, x) in f.features.iter().enumerate() {
            features[[i, j]] = *x;
        }
    }
    let labels = nodes.iter().map(|f| f.label).collect();
    Ok(TrafficGraph {
        nodes,
        features,
        adjacency,
        labels,
        train_mask: vec![false; n],
        test_mask: vec![false; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowkit::FlowKey;
    use std::net::Ipv4Addr;

    fn ep(last: u8, port: u16) -> Endpoint {
        Endpoint::new(Ipv4Addr::new(10, 0, 0, last), port)
    }

    fn node(e: Endpoint) -> ActivityFlow {
        ActivityFlow {
            source: e,
            features: [0.0; N_FEATURES],
            basic_flow_count: 1,
            label: Label::Benign,
        }
    }

    fn flow(s: Endpoint, d: Endpoint) -> BasicFlow {
        BasicFlow {
            key: FlowKey {
                src_ip: s.ip,
                src_port: s.port,
                dst_ip: d.ip,
                dst_port: d.port,
            },
            features: [0.0; N_FEATURES],
            packet_count: 1,
            label: Label::Benign,
        }
    }

    #[test]
    fn one_flow_one_edge() {
        let (a, b) = (ep(1, 1), ep(2, 80));
        let g = build_graph(&[node(b), node(a)], &[flow(a, b)]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.nodes[0].source, a);
        assert_eq!(g.adjacency.edge_count(), 1);
        assert_eq!(g.adjacency.weight(0, 1), 1.0);
    }

    #[test]
    fn both_directions_collapse() {
        let (a, b) = (ep(1, 1), ep(2, 80));
        let g = build_graph(&[node(a), node(b)], &[flow(a, b), flow(b, a)]).unwrap();
        assert_eq!(g.adjacency.edge_count(), 1);
        assert_eq!(g.adjacency.weight(1, 0), 1.0);
    }

    #[test]
    fn star_around_server() {
        let s = ep(9, 80);
        let clients: Vec<Endpoint> = (1..=3).map(|i| ep(i, 1000)).collect();
        let mut nodes: Vec<_> = clients.iter().map(|c| node(*c)).collect();
        nodes.push(node(s));
        let basic: Vec<_> = clients.iter().map(|c| flow(*c, s)).collect();
        let g = build_graph(&nodes, &basic).unwrap();
        let si = g.index_of(s).unwrap();
        assert_eq!(g.adjacency.degree(si), 3.0);
        for c in &clients {
            assert_eq!(g.adjacency.degree(g.index_of(*c).unwrap()), 1.0);
        }
    }

    #[test]
    fn dangling_endpoint_named() {
        let (a, b) = (ep(1, 1), ep(2, 80));
        match build_graph(&[node(a)], &[flow(a, b)]) {
            Err(GraphError::DanglingEndpoint(e)) => assert_eq!(e, b),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn masks_must_be_disjoint() {
        let (a, b) = (ep(1, 1), ep(2, 80));
        let mut g = build_graph(&[node(a), node(b)], &[flow(a, b)]).unwrap();
        assert!(g.set_masks(vec![true, false], vec![true, true]).is_err());
        assert!(g.set_masks(vec![true, false], vec![false, true]).is_ok());
    }
}
