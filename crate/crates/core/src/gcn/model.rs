use ndarray::{Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GcnError;
use crate::netgraph::NormalizedAdjacency;
use crate::rng;

/// Probabilities are clamped to this floor before taking the log.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub learning_rate: f64,
    /// Number of propagation layers (weight matrices).
    pub layers: usize,
    pub hidden_width: usize,
    pub weight_decay: f64,
    /// Drop probability on hidden activations during training.
    pub dropout: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.15,
            layers: 2,
            hidden_width: 128,
            weight_decay: 5e-4,
            dropout: 0.5,
            epochs: 200,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), GcnError> {
        if self.layers < 1 || self.hidden_width < 1 {
            return Err(GcnError::Config(
                "layers and hidden_width must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(GcnError::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0)
            || self.weight_decay.is_nan()
            || self.weight_decay < 0.0
        {
            return Err(GcnError::Config(
                "learning_rate must be > 0 and weight_decay >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Stacked propagation layers `H ← ReLU(Â H W)` with a softmax head and no
/// bias terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub weights: Vec<Array2<f64>>,
    pub hyperparams: Hyperparams,
}

impl GcnModel {
    pub fn input_dim(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn classes(&self) -> usize {
        self.weights[self.weights.len() - 1].ncols()
    }

    pub fn hidden_width(&self) -> usize {
        self.weights[0].ncols()
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    /// `½ Σ ‖W‖²_F`.
    pub fn half_sq_norm(&self) -> f64 {
        0.5 * self
            .weights
            .iter()
            .map(|w| w.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }
}

fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-bound..bound))
}

/// Two-layer model with Glorot-uniform weights.
pub fn init_weights(d: usize, h: usize, c: usize, seed: u64) -> GcnModel {
    let hp = Hyperparams {
        hidden_width: h,
        seed,
        ..Hyperparams::default()
    };
    init_model(d, c, &hp)
}

/// Model with `hp.layers` weight matrices: `d×h`, `h×h`…, `h×c`.
pub fn init_model(d: usize, c: usize, hp: &Hyperparams) -> GcnModel {
    let mut rng = rng::substream(hp.seed, rng::stream::INIT);
    let mut dims = vec![d];
    dims.extend(std::iter::repeat_n(
        hp.hidden_width,
        hp.layers.saturating_sub(1),
    ));
    dims.push(c);
    let weights = dims
        .windows(2)
        .map(|w| glorot(w[0], w[1], &mut rng))
        .collect();
    GcnModel {
        weights,
        hyperparams: hp.clone(),
    }
}

/// Row-stochastic output of the softmax head.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution(pub Array2<f64>);

impl ClassDistribution {
    /// Argmax per row; ties go to the lowest class index.
    pub fn argmax(&self) -> Vec<usize> {
        self.0
            .rows()
            .into_iter()
            .map(|r| {
                let mut best = 0;
                for (k, &v) in r.iter().enumerate() {
                    if v > r[best] {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }
}

/// Inverted-dropout multipliers for each hidden layer: 0 for dropped units,
/// `1/(1-p)` for survivors.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks(pub Vec<Array2<f64>>);

impl DropoutMasks {
    pub fn sample(n: usize, model: &GcnModel, p: f64, rng: &mut impl Rng) -> Self {
        let keep = 1.0 - p;
        let scale = 1.0 / keep;
        let masks = model.weights[..model.layers() - 1]
            .iter()
            .map(|w| {
                Array2::from_shape_simple_fn((n, w.ncols()), || {
                    if rng.random::<f64>() < keep {
                        scale
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        DropoutMasks(masks)
    }
}

/// Intermediate values kept for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct ForwardCache {
    /// `Â H_l` for every layer input.
    pub propagated: Vec<Array2<f64>>,
    /// Pre-activations of hidden layers.
    pub pre: Vec<Array2<f64>>,
    pub probs: Array2<f64>,
}

pub(crate) fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

fn check_shapes(
    x: &Array2<f64>,
    a_hat: &NormalizedAdjacency,
    model: &GcnModel,
) -> Result<(), GcnError> {
    if x.nrows() != a_hat.n() {
        return Err(GcnError::Shape(format!(
            "X has {} rows but Â is {}x{}",
            x.nrows(),
            a_hat.n(),
            a_hat.n()
        )));
    }
    if x.ncols() != model.input_dim() {
        return Err(GcnError::Shape(format!(
            "X has {} columns but W0 has {} rows",
            x.ncols(),
            model.input_dim()
        )));
    }
    for (l, w) in model.weights.windows(2).enumerate() {
        if w[0].ncols() != w[1].nrows() {
            return Err(GcnError::Shape(format!("W{l} and W{} do not chain", l + 1)));
        }
    }
    Ok(())
}

/// Forward pass from an already propagated input `ÂX`.
pub(crate) fn forward_from_propagated(
    ax: &Array2<f64>,
    a_hat: &NormalizedAdjacency,
    model: &GcnModel,
    masks: Option<&DropoutMasks>,
) -> ForwardCache {
    let last = model.layers() - 1;
    let mut propagated = vec![ax.clone()];
    let mut pre = Vec::with_capacity(last);
    for (l, w) in model.weights.iter().enumerate() {
        let z = propagated[l].dot(w);
        if l == last {
            return ForwardCache {
                propagated,
                pre,
                probs: softmax_rows(&z),
            };
        }
        let mut h = z.mapv(|v| v.max(0.0));
        if let Some(m) = masks {
            h *= &m.0[l];
        }
        pre.push(z);
        propagated.push(a_hat.matmul(&h));
    }
    unreachable!("model has at least one layer")
}

/// `Z = softmax(Â · ReLU(Â X W0) · W1)` (generalized to any depth). With
/// `masks`, hidden activations are dropped and rescaled.
pub fn forward(
    x: &Array2<f64>,
    a_hat: &NormalizedAdjacency,
    model: &GcnModel,
    masks: Option<&DropoutMasks>,
) -> Result<ClassDistribution, GcnError> {
    check_shapes(x, a_hat, model)?;
    if let Some(m) = masks {
        if m.0.len() != model.layers() - 1
            || m.0
                .iter()
                .zip(&model.weights)
                .any(|(mk, w)| mk.dim() != (x.nrows(), w.ncols()))
        {
            return Err(GcnError::Shape(
                "dropout mask does not match hidden layers".into(),
            ));
        }
    }
    let ax = a_hat.matmul(x);
    Ok(ClassDistribution(
        forward_from_propagated(&ax, a_hat, model, masks).probs,
    ))
}

/// Mean masked cross-entropy plus `weight_decay · ½ Σ ‖W‖²_F`.
pub fn loss(
    z: &ClassDistribution,
    targets: &[usize],
    mask: &[bool],
    model: &GcnModel,
    weight_decay: f64,
) -> Result<f64, GcnError> {
    let rows: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(GcnError::EmptyMask);
    }
    let ce: f64 = rows
        .iter()
        .map(|&i| -z.0[[i, targets[i]]].max(LOG_FLOOR).ln())
        .sum::<f64>()
        / rows.len() as f64;
    Ok(ce + weight_decay * model.half_sq_norm())
}

/// Class index per node, without dropout.
pub fn predict(
    model: &GcnModel,
    x: &Array2<f64>,
    a_hat: &NormalizedAdjacency,
) -> Result<Vec<usize>, GcnError> {
    Ok(forward(x, a_hat, model, None)?.argmax())
}

/// Gradients of [`loss`] with respect to every weight matrix.
pub(crate) fn gradients(
    cache: &ForwardCache,
    a_hat: &NormalizedAdjacency,
    model: &GcnModel,
    masks: Option<&DropoutMasks>,
    targets: &[usize],
    rows: &[usize],
    weight_decay: f64,
) -> Vec<Array2<f64>> {
    let m = rows.len() as f64;
    let mut delta = Array2::zeros(cache.probs.raw_dim());
    for &i in rows {
        let mut r = delta.row_mut(i);
        r.assign(&cache.probs.row(i));
        r[targets[i]] -= 1.0;
        r.mapv_inplace(|v| v / m);
    }
    let mut grads = vec![Array2::zeros((0, 0)); model.layers()];
    for l in (0..model.layers()).rev() {
        let w = &model.weights[l];
        let mut g = cache.propagated[l].t().dot(&delta);
        g.scaled_add(weight_decay, w);
        grads[l] = g;
        if l == 0 {
            break;
        }
        // Â is symmetric, so Âᵀ·M = Â·M.
        let mut dh = a_hat.matmul(&delta.dot(&w.t()));
        if let Some(mk) = masks {
            dh *= &mk.0[l - 1];
        }
        ndarray::Zip::from(&mut dh)
            .and(&cache.pre[l - 1])
            .for_each(|d, &p| {
                if p <= 0.0 {
                    *d = 0.0;
                }
            });
        delta = dh;
    }
    grads
}

/// Sum of each row, used by tests and invariants.
pub fn row_sums(z: &ClassDistribution) -> Vec<f64> {
    z.0.sum_axis(Axis(1)).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn init_shapes_and_determinism() {
        let a = init_weights(8, 128, 2, 3);
        assert_eq!(a.weights[0].dim(), (8, 128));
        assert_eq!(a.weights[1].dim(), (128, 2));
        assert_eq!(a, init_weights(8, 128, 2, 3));
        assert_ne!(a, init_weights(8, 128, 2, 4));
    }

    #[test]
    fn glorot_bound_for_h1() {
        let m = init_weights(5, 1, 3, 11);
        let bound = (6.0f64 / 6.0).sqrt();
        assert!(m.weights[0].iter().all(|v| v.abs() <= bound));
        let bound1 = (6.0f64 / 4.0).sqrt();
        assert!(m.weights[1].iter().all(|v| v.abs() <= bound1));
    }

    #[test]
    fn zero_head_gives_uniform() {
        let model = GcnModel {
            weights: vec![Array2::eye(3), Array2::zeros((3, 4))],
            hyperparams: Hyperparams::default(),
        };
        let x = array![[1.0, 0.0, 2.0], [0.5, 0.5, 0.0]];
        let z = forward(&x, &NormalizedAdjacency::identity(2), &model, None).unwrap();
        assert!(z.0.iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn softmax_stable_for_extreme_logits() {
        let z = softmax_rows(&array![[1e4, -1e4, 0.0], [-1e4, -1e4, -1e4]]);
        for s in z.sum_axis(Axis(1)) {
            assert!((s - 1.0).abs() < 1e-9);
        }
        assert!(z.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn shape_mismatch_is_error() {
        let model = init_weights(3, 4, 2, 0);
        let x = Array2::zeros((2, 5));
        assert!(matches!(
            forward(&x, &NormalizedAdjacency::identity(2), &model, None),
            Err(GcnError::Shape(_))
        ));
        let x = Array2::zeros((3, 3));
        assert!(forward(&x, &NormalizedAdjacency::identity(2), &model, None).is_err());
    }

    #[test]
    fn argmax_ties_low() {
        let z = ClassDistribution(array![[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]]);
        assert_eq!(z.argmax(), vec![0, 0, 1]);
    }

    #[test]
    fn loss_analytic_values() {
        let model = GcnModel {
            weights: vec![array![[1.0, 2.0]], array![[3.0], [0.0]]],
            hyperparams: Hyperparams::default(),
        };
        let perfect = ClassDistribution(array![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(
            loss(&perfect, &[0, 1], &[true, true], &model, 0.0).unwrap(),
            0.0
        );
        let uniform = ClassDistribution(array![[0.5, 0.5], [0.5, 0.5]]);
        let l = loss(&uniform, &[0, 1], &[true, true], &model, 0.0).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        // ½ (1 + 4 + 9) = 7
        let l = loss(&perfect, &[0, 1], &[true, true], &model, 0.0005).unwrap();
        assert!((l - 0.0005 * 7.0).abs() < 1e-15);
        assert!(matches!(
            loss(&perfect, &[0, 1], &[false, false], &model, 0.0),
            Err(GcnError::EmptyMask)
        ));
    }
}
