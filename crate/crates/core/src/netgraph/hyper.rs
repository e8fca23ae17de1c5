use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Adjacency, GraphError, TrafficGraph};
use crate::flowkit::{BasicFlow, Endpoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HyperedgeGrouping {
    /// One hyperedge per destination endpoint: the destination plus every
    /// source that sent it a basic flow.
    #[default]
    ByDestination,
}

/// Hyperedges as sorted node-index sets of size at least two.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    pub n: usize,
    pub hyperedges: Vec<Vec<usize>>,
}

pub fn build_hypergraph(
    graph: &TrafficGraph,
    basic: &[BasicFlow],
    grouping: HyperedgeGrouping,
) -> Result<Hypergraph, GraphError> {
    match grouping {
        HyperedgeGrouping::ByDestination => {
            let mut by_dst: BTreeMap<Endpoint, BTreeSet<usize>> = BTreeMap::new();
            for f in basic {
                let idx = |e: Endpoint| graph.index_of(e).ok_or(GraphError::DanglingEndpoint(e));
                let (s, d) = (idx(f.key.src())?, idx(f.key.dst())?);
                let members = by_dst.entry(f.key.dst()).or_default();
                members.insert(d);
                members.insert(s);
            }
            let hyperedges = by_dst
                .into_values()
                .filter(|m| m.len() >= 2)
                .map(|m| m.into_iter().collect())
                .collect();
            Ok(Hypergraph {
                n: graph.n(),
                hyperedges,
            })
        }
    }
}

fn sq_dist(x: &Array2<f64>, a: usize, b: usize) -> f64 {
    x.row(a)
        .iter()
        .zip(x.row(b).iter())
        .map(|(p, q)| (p - q) * (p - q))
        .sum()
}

/// Approximates each hyperedge by a star-plus-edge around its most distant
/// pair `(u, v)` in feature space: edge `(u, v)` plus edges from `u` and `v`
/// to every other member, each weighted `1 / (2|e| - 3)`. Distance ties go
/// to the lexicographically smallest index pair. Weights from different
/// hyperedges are summed.
pub fn hypergraph_expand(h: &Hypergraph, x: &Array2<f64>) -> Result<Adjacency, GraphError> {
    if x.nrows() < h.n {
        return Err(GraphError::Invalid(format!(
            "feature matrix has {} rows, hypergraph {} nodes",
            x.nrows(),
            h.n
        )));
    }
    let mut edges = Vec::new();
    for e in &h.hyperedges {
        if e.len() < 2 {
            return Err(GraphError::Invalid(
                "hyperedge with fewer than two nodes".into(),
            ));
        }
        let mut sorted = e.clone();
        sorted.sort_unstable();
        let (mut u, mut v, mut best) = (sorted[0], sorted[1], f64::NEG_INFINITY);
        for (a_pos, &a) in sorted.iter().enumerate() {
            for &b in &sorted[a_pos + 1..] {
                let d = sq_dist(x, a, b);
                if d > best {
                    (u, v, best) = (a, b, d);
                }
            }
        }
        let w = 1.0 / (2.0 * sorted.len() as f64 - 3.0);
        edges.push((u, v, w));
        for &k in sorted.iter().filter(|&&k| k != u && k != v) {
            edges.push((u, k, w));
            edges.push((v, k, w));
        }
    }
    Adjacency::from_weighted_edges(h.n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn pair_hyperedge_is_unit_edge() {
        let h = Hypergraph {
            n: 2,
            hyperedges: vec![vec![0, 1]],
        };
        let a = hypergraph_expand(&h, &array![[0.0], [5.0]]).unwrap();
        assert_eq!(a.weight(0, 1), 1.0);
    }

    #[test]
    fn triangle_weights_one_third() {
        // 0 and 2 are farthest apart; 1 is the mediator.
        let h = Hypergraph {
            n: 3,
            hyperedges: vec![vec![0, 1, 2]],
        };
        let a = hypergraph_expand(&h, &array![[0.0], [1.0], [10.0]]).unwrap();
        for (i, j) in [(0, 2), (0, 1), (1, 2)] {
            assert!((a.weight(i, j) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_features_tie_break_to_first_pair() {
        let h = Hypergraph {
            n: 5,
            hyperedges: vec![vec![4, 1, 3, 2]],
        };
        let x = Array2::from_elem((5, 2), 1.0);
        let a = hypergraph_expand(&h, &x).unwrap();
        let w = 1.0 / 5.0;
        // Pair (1, 2) is the tie winner; 3 and 4 hang off both.
        assert_eq!(a.weight(1, 2), w);
        for k in [3, 4] {
            assert_eq!(a.weight(1, k), w);
            assert_eq!(a.weight(2, k), w);
        }
        assert_eq!(a.weight(3, 4), 0.0);
        assert_eq!(a, hypergraph_expand(&h, &x).unwrap());
    }

    #[test]
    fn weights_accumulate_across_hyperedges() {
        let h = Hypergraph {
            n: 2,
            hyperedges: vec![vec![0, 1], vec![0, 1]],
        };
        assert_eq!(
            hypergraph_expand(&h, &array![[0.0], [1.0]])
                .unwrap()
                .weight(0, 1),
            2.0
        );
    }
}
