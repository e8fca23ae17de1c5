//! Entropy-criterion random forest over tabular features.

use ndarray::{Array2, ArrayView1};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub seed: u64,
    /// Candidate features per split; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 3,
            seed: 32,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(c) => return c,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
    pub classes: usize,
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best
}

struct Builder<'a> {
    x: &'a Array2<f64>,
    y: &'a [usize],
    classes: usize,
    max_depth: usize,
    max_features: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.classes];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    /// Best `(gain, feature, threshold)` among a random feature subset.
    fn best_split(&mut self, rows: &[usize], parent: &[usize]) -> Option<(usize, f64)> {
        let d = self.x.ncols();
        let n = rows.len();
        let h_parent = entropy(parent, n);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut candidates = sample(&mut self.rng, d, self.max_features.min(d)).into_vec();
        candidates.sort_unstable();
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
        for f in candidates {
            order.clear();
            order.extend(rows.iter().map(|&r| (self.x[[r, f]], self.y[r])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0usize; self.classes];
            for k in 0..n - 1 {
                left[order[k].1] += 1;
                if order[k].0 == order[k + 1].0 {
                    continue;
                }
                let nl = k + 1;
                let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
                let h = (nl as f64 * entropy(&left, nl)
                    + (n - nl) as f64 * entropy(&right, n - nl))
                    / n as f64;
                let gain = h_parent - h;
                if gain > 1e-12 && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, f, 0.5 * (order[k].0 + order[k + 1].0)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&rows);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(majority(&counts)));
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.max_depth || pure || rows.len() < 2 {
            return id;
        }
        if let Some((feature, threshold)) = self.best_split(&rows, &counts) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&i| self.x[[i, feature]] <= threshold);
            let left = self.grow(l, depth + 1);
            let right = self.grow(r, depth + 1);
            self.nodes[id] = Node::Split {
                feature,
                threshold,
                left,
                right,
            };
        }
        id
    }
}

impl RandomForest {
    /// Fits on the given `rows` of `x`; every tree sees a bootstrap sample.
    pub fn fit(
        x: &Array2<f64>,
        y: &[usize],
        rows: &[usize],
        classes: usize,
        cfg: &ForestConfig,
    ) -> Result<Self, PipelineError> {
        if rows.is_empty() {
            return Err(PipelineError::Split(
                "random forest needs at least one training row".into(),
            ));
        }
        if cfg.n_trees == 0 {
            return Err(PipelineError::Config(
                "random forest needs at least one tree".into(),
            ));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= x.nrows() || y[r] >= classes) {
            return Err(PipelineError::Split(format!("row {bad} out of range")));
        }
        let d = x.ncols();
        let max_features = cfg
            .max_features
            .unwrap_or(((d as f64).sqrt().floor() as usize).max(1))
            .max(1);
        let mut trees = Vec::with_capacity(cfg.n_trees);
        for t in 0..cfg.n_trees {
            let mut rng = rng::indexed_substream(cfg.seed, rng::stream::FOREST, t as u64);
            let boot: Vec<usize> = (0..rows.len())
                .map(|_| rows[rng.random_range(0..rows.len())])
                .collect();
            let mut b = Builder {
                x,
                y,
                classes,
                max_depth: cfg.max_depth,
                max_features,
                rng,
                nodes: Vec::new(),
            };
            b.grow(boot, 0);
            trees.push(Tree { nodes: b.nodes });
        }
        Ok(RandomForest { trees, classes })
    }

    /// Majority vote over trees; ties go to the lowest class.
    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        x.rows()
            .into_iter()
            .map(|row| {
                let mut votes = vec![0usize; self.classes];
                for t in &self.trees {
                    votes[t.predict_row(row)] += 1;
                }
                majority(&votes)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn threshold_separable_is_perfect() {
        let x = array![[0.1], [0.2], [0.3], [0.7], [0.8], [0.9]];
        let y = [0, 0, 0, 1, 1, 1];
        let rows: Vec<usize> = (0..6).collect();
        let f = RandomForest::fit(&x, &y, &rows, 2, &ForestConfig::default()).unwrap();
        assert_eq!(f.predict(&x), y.to_vec());
    }

    #[test]
    fn depth_zero_predicts_majority() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = [1, 1, 0];
        let cfg = ForestConfig {
            max_depth: 0,
            n_trees: 1,
            ..ForestConfig::default()
        };
        // A single bootstrap may not preserve the majority; check the stump
        // against its own training sample instead.
        let f = RandomForest::fit(&x, &y, &[0, 1, 2], 2, &cfg).unwrap();
        assert_eq!(f.trees[0].depth(), 0);
        let many = ForestConfig {
            max_depth: 0,
            ..ForestConfig::default()
        };
        let f = RandomForest::fit(&x, &y, &[0, 1, 2], 2, &many).unwrap();
        assert_eq!(f.predict(&x), vec![1, 1, 1]);
    }

    #[test]
    fn depth_bound_respected() {
        let x = Array2::from_shape_fn((64, 4), |(i, j)| ((i * 7 + j * 13) % 17) as f64);
        let y: Vec<usize> = (0..64).map(|i| (i * 5) % 3).collect();
        let rows: Vec<usize> = (0..64).collect();
        let f = RandomForest::fit(
            &x,
            &y,
            &rows,
            3,
            &ForestConfig {
                n_trees: 10,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        assert!(f.trees.iter().all(|t| t.depth() <= 3));
    }

    #[test]
    fn seeded() {
        let x = Array2::from_shape_fn((30, 3), |(i, j)| ((i * 3 + j) % 7) as f64);
        let y: Vec<usize> = (0..30).map(|i| i % 2).collect();
        let rows: Vec<usize> = (0..30).collect();
        let a = RandomForest::fit(&x, &y, &rows, 2, &ForestConfig::default()).unwrap();
        let b = RandomForest::fit(&x, &y, &rows, 2, &ForestConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
