use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::rng;

/// How train nodes are drawn. Every mode is stratified by class; nodes not
/// drawn for training form the test set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitSpec {
    /// Exactly `per_class` train nodes from every class.
    FixedSampling {
        per_class: usize,
    },
    Ratio {
        train_fraction: f64,
    },
    /// A ratio split meant for tiny train fractions.
    SmallTrain {
        train_fraction: f64,
    },
}

impl SplitSpec {
    pub const DEFAULT_PER_CLASS: usize = 20_000;
    pub const DEFAULT_RATIO: f64 = 0.8;
    pub const DEFAULT_SMALL: f64 = 0.05;

    pub fn fixed() -> Self {
        SplitSpec::FixedSampling {
            per_class: Self::DEFAULT_PER_CLASS,
        }
    }

    pub fn ratio() -> Self {
        SplitSpec::Ratio {
            train_fraction: Self::DEFAULT_RATIO,
        }
    }

    pub fn small_train() -> Self {
        SplitSpec::SmallTrain {
            train_fraction: Self::DEFAULT_SMALL,
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::ratio()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Masks {
    pub train: Vec<bool>,
    pub test: Vec<bool>,
}

impl Masks {
    pub fn train_count(&self) -> usize {
        self.train.iter().filter(|m| **m).count()
    }

    pub fn test_count(&self) -> usize {
        self.test.iter().filter(|m| **m).count()
    }
}

/// Draws disjoint train/test masks over the nodes where `eligible` is set.
/// Ratio modes keep at least one train node per non-empty class.
pub fn split(
    targets: &[usize],
    eligible: &[bool],
    classes: usize,
    spec: SplitSpec,
    seed: u64,
) -> Result<Masks, PipelineError> {
    if targets.len() != eligible.len() {
        return Err(PipelineError::Split(
            "targets and eligibility mask differ in length".into(),
        ));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, (&t, &e)) in targets.iter().zip(eligible).enumerate() {
        if e {
            let bucket = by_class.get_mut(t).ok_or_else(|| {
                PipelineError::Split(format!("target {t} of node {i} out of range"))
            })?;
            bucket.push(i);
        }
    }
    let mut rng = rng::substream(seed, rng::stream::SPLITS);
    let mut train = vec![false; targets.len()];
    for (class, members) in by_class.iter_mut().enumerate() {
        let n = members.len();
        let take = match spec {
            SplitSpec::FixedSampling { per_class } => {
                if per_class > n {
                    return Err(PipelineError::Split(format!(
                        "class {class} has {n} nodes, fewer than the requested {per_class}"
                    )));
                }
                per_class
            }
            SplitSpec::Ratio { train_fraction } | SplitSpec::SmallTrain { train_fraction } => {
                if !(train_fraction > 0.0 && train_fraction < 1.0) {
                    return Err(PipelineError::Split(format!(
                        "train fraction {train_fraction} outside (0, 1)"
                    )));
                }
                if n == 0 {
                    0
                } else {
                    ((train_fraction * n as f64).round() as usize).clamp(1, n)
                }
            }
        };
        members.shuffle(&mut rng);
        for &i in &members[..take] {
            train[i] = true;
        }
    }
    let test = eligible
        .iter()
        .zip(&train)
        .map(|(&e, &t)| e && !t)
        .collect();
    Ok(Masks { train, test })
}
