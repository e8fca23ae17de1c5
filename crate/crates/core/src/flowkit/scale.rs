use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Plain z-score.
    ZScore,
    /// `ln(1 + x)` on every (non-negative) feature, then z-score.
    #[default]
    LogZScore,
}

/// Per-feature z-score fitted on a subset of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub scaling: Scaling,
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

impl Standardizer {
    /// Fits on the rows where `mask` is set. A constant feature gets unit
    /// scale so it maps to zero.
    pub fn fit(x: &Array2<f64>, mask: &[bool], scaling: Scaling) -> Self {
        let pre = precondition(x, scaling);
        let rows: Vec<usize> = mask
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(i, _)| i)
            .collect();
        let d = x.ncols();
        let mut mean = Array1::zeros(d);
        let mut std = Array1::ones(d);
        if !rows.is_empty() {
            let sub = pre.select(Axis(0), &rows);
            let n = rows.len() as f64;
            for j in 0..d {
                let col = sub.column(j);
                let m = col.sum() / n;
                let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
                mean[j] = m;
                std[j] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
            }
        }
        Standardizer { scaling, mean, std }
    }

    pub fn transform(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = precondition(x, self.scaling);
        for mut row in out.rows_mut() {
            for j in 0..row.len() {
                row[j] = (row[j] - self.mean[j]) / self.std[j];
            }
        }
        out
    }
}

fn precondition(x: &Array2<f64>, scaling: Scaling) -> Array2<f64> {
    match scaling {
        Scaling::ZScore => x.clone(),
        Scaling::LogZScore => x.mapv(|v| v.max(0.0).ln_1p()),
    }
}
