use ndarray::Array2;

use super::model::{
    forward_from_propagated, gradients, init_model, DropoutMasks, GcnModel, Hyperparams, LOG_FLOOR,
};
use super::GcnError;
use crate::netgraph::NormalizedAdjacency;
use crate::rng;

/// A trained model and its per-epoch training loss.
#[derive(Debug, Clone)]
pub struct Trained {
    pub model: GcnModel,
    /// Loss (with dropout active, as optimized) before each update.
    pub losses: Vec<f64>,
}

/// Full-batch gradient descent on the masked cross-entropy with weight
/// decay. A fresh dropout mask is drawn every epoch from the `dropout`
/// substream of `hp.seed`.
pub fn train(
    x: &Array2<f64>,
    a_hat: &NormalizedAdjacency,
    targets: &[usize],
    mask: &[bool],
    classes: usize,
    hp: &Hyperparams,
) -> Result<Trained, GcnError> {
    hp.validate()?;
    if x.nrows() != a_hat.n() || targets.len() != x.nrows() || mask.len() != x.nrows() {
        return Err(GcnError::Shape(
            "X, Â, targets and mask disagree on node count".into(),
        ));
    }
    let rows: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(GcnError::EmptyMask);
    }
    if let Some(&bad) = rows.iter().find(|&&i| targets[i] >= classes) {
        return Err(GcnError::Shape(format!(
            "target {} of node {bad} out of range",
            targets[bad]
        )));
    }
    for c in 0..classes {
        if !rows.iter().any(|&i| targets[i] == c) {
            return Err(GcnError::MissingClass(c));
        }
    }

    let mut model = init_model(x.ncols(), classes, hp);
    let mut drop_rng = rng::substream(hp.seed, rng::stream::DROPOUT);
    let ax = a_hat.matmul(x);
    let mut losses = Vec::with_capacity(hp.epochs);
    for epoch in 0..hp.epochs {
        let masks = (hp.dropout > 0.0 && model.layers() > 1)
            .then(|| DropoutMasks::sample(x.nrows(), &model, hp.dropout, &mut drop_rng));
        let cache = forward_from_propagated(&ax, a_hat, &model, masks.as_ref());
        let ce = rows
            .iter()
            .map(|&i| -cache.probs[[i, targets[i]]].max(LOG_FLOOR).ln())
            .sum::<f64>()
            / rows.len() as f64;
        let loss = ce + hp.weight_decay * model.half_sq_norm();
        if !loss.is_finite() {
            return Err(GcnError::NonFinite { epoch, loss });
        }
        losses.push(loss);
        let grads = gradients(
            &cache,
            a_hat,
            &model,
            masks.as_ref(),
            targets,
            &rows,
            hp.weight_decay,
        );
        for (w, g) in model.weights.iter_mut().zip(&grads) {
            w.scaled_add(-hp.learning_rate, g);
        }
    }
    Ok(Trained { model, losses })
}
