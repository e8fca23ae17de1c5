//! Dense graph convolutional network trained by full-batch gradient descent.

pub mod checkpoint;
mod model;
mod train;

use thiserror::Error;

pub use model::{
    forward, init_model, init_weights, loss, predict, row_sums, ClassDistribution, DropoutMasks,
    GcnModel, Hyperparams, LOG_FLOOR,
};
pub use train::{train, Trained};

/// Analytic gradients of [`loss`] for a fixed dropout mask (or none),
/// exposed for gradient checking.
pub fn loss_gradients(
    x: &ndarray::Array2<f64>,
    a_hat: &crate::netgraph::NormalizedAdjacency,
    model: &GcnModel,
    masks: Option<&DropoutMasks>,
    targets: &[usize],
    mask: &[bool],
    weight_decay: f64,
) -> Result<Vec<ndarray::Array2<f64>>, GcnError> {
    forward(x, a_hat, model, masks)?;
    let rows: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(GcnError::EmptyMask);
    }
    let cache = model::forward_from_propagated(&a_hat.matmul(x), a_hat, model, masks);
    Ok(model::gradients(
        &cache,
        a_hat,
        model,
        masks,
        targets,
        &rows,
        weight_decay,
    ))
}

#[derive(Debug, Error)]
pub enum GcnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("training mask is empty")]
    EmptyMask,
    #[error("class {0} has no node in the training mask")]
    MissingClass(usize),
    #[error("loss became non-finite at epoch {epoch}: {loss}")]
    NonFinite { epoch: usize, loss: f64 },
    #[error("invalid hyperparameters: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
