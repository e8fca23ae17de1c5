use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// F1 of the given positive class.
    Binary { positive: usize },
    /// Unweighted mean of per-class F1; a class with no true or predicted
    /// member scores 0.
    Macro,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: f64,
    pub per_class_f1: Vec<f64>,
    /// `confusion[truth][pred]`.
    pub confusion: Vec<Vec<u64>>,
}

impl Metrics {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    /// One-vs-rest accuracy of class `c`.
    pub fn class_accuracy(&self, c: usize) -> f64 {
        let total = self.total();
        let tp = self.confusion[c][c];
        let fp: u64 = (0..self.confusion.len())
            .filter(|&t| t != c)
            .map(|t| self.confusion[t][c])
            .sum();
        let fn_: u64 = self.confusion[c].iter().sum::<u64>() - tp;
        (total - fp - fn_) as f64 / total as f64
    }
}

/// Confusion matrix, accuracy and F1 of `pred` against `truth`.
pub fn evaluate(
    pred: &[usize],
    truth: &[usize],
    classes: usize,
    averaging: Averaging,
) -> Result<Metrics, PipelineError> {
    if pred.len() != truth.len() {
        return Err(PipelineError::Evaluation(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(PipelineError::Evaluation("nothing to evaluate".into()));
    }
    let mut confusion = vec![vec![0u64; classes]; classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= classes || t >= classes {
            return Err(PipelineError::Evaluation(format!(
                "class index out of range ({t} → {p})"
            )));
        }
        confusion[t][p] += 1;
    }
    let total: u64 = confusion.iter().flatten().sum();
    let correct: u64 = (0..classes).map(|c| confusion[c][c]).sum();
    let per_class_f1: Vec<f64> = (0..classes)
        .map(|c| {
            let tp = confusion[c][c];
            let predicted: u64 = (0..classes).map(|t| confusion[t][c]).sum();
            let actual: u64 = confusion[c].iter().sum();
            let denom = predicted + actual;
            if denom == 0 {
                0.0
            } else {
                2.0 * tp as f64 / denom as f64
            }
        })
        .collect();
    let f1 = match averaging {
        Averaging::Binary { positive } => *per_class_f1
            .get(positive)
            .ok_or_else(|| PipelineError::Evaluation("positive class out of range".into()))?,
        Averaging::Macro => per_class_f1.iter().sum::<f64>() / classes as f64,
    };
    Ok(Metrics {
        accuracy: correct as f64 / total as f64,
        f1,
        per_class_f1,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_perfect() {
        let m = evaluate(&[0, 1, 2, 1], &[0, 1, 2, 1], 3, Averaging::Macro).unwrap();
        assert_eq!((m.accuracy, m.f1), (1.0, 1.0));
    }

    #[test]
    fn one_of_each_cell() {
        // TP, FP, FN, TN with attack = 1.
        let m = evaluate(
            &[1, 1, 0, 0],
            &[1, 0, 1, 0],
            2,
            Averaging::Binary { positive: 1 },
        )
        .unwrap();
        assert_eq!(m.f1, 0.5);
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn all_negative_predictions_score_zero() {
        let m = evaluate(&[0, 0, 0], &[1, 1, 0], 2, Averaging::Binary { positive: 1 }).unwrap();
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn absent_class_counts_as_zero_in_macro() {
        let m = evaluate(&[0, 1], &[0, 1], 3, Averaging::Macro).unwrap();
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_is_error() {
        assert!(evaluate(&[], &[], 2, Averaging::Macro).is_err());
    }
}
