//! Feed-forward classifier: dropout → 128 ReLU → dropout → 64 tanh → softmax(3).
//!
//! Gradients are derived by hand for the mean categorical cross-entropy of a
//! mini-batch. Dropout is inverted (survivors scaled by `1 / keep`), so
//! evaluation uses the weights as they are.

mod adagrad;
mod checkpoint;
mod train;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::label::{BiasLabel, Posterior};

pub use adagrad::Adagrad;
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use train::{train, train_with_history, TrainConfig};

pub const HIDDEN1: usize = 128;
pub const HIDDEN2: usize = 64;
pub const CLASSES: usize = BiasLabel::COUNT;

/// Probabilities below this are clamped before taking the log.
pub const LOSS_FLOOR: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum MlpError {
    #[error("input has {actual} features, model expects {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("cannot train on an empty dataset")]
    EmptyDataset,
    #[error("{inputs} inputs but {labels} labels")]
    LabelCount { inputs: usize, labels: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("non-finite input value")]
    NonFinite,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Network weights. Also used for gradients and optimizer state, which
/// share the shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// `HIDDEN1 × d`
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `HIDDEN2 × HIDDEN1`
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    /// `CLASSES × HIDDEN2`
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

pub type Gradients = Mlp;

/// Activations kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct Cache {
    /// Input after dropout.
    x: Array2<f64>,
    z1: Array2<f64>,
    /// Inverted-dropout multipliers applied to `relu(z1)`, if any.
    mask1: Option<Array2<f64>>,
    /// `relu(z1)` after dropout.
    h1: Array2<f64>,
    h2: Array2<f64>,
    probs: Array2<f64>,
}

impl Cache {
    pub fn posteriors(&self) -> Vec<Posterior> {
        rows_to_posteriors(&self.probs)
    }
}

fn rows_to_posteriors(probs: &Array2<f64>) -> Vec<Posterior> {
    probs.rows().into_iter().map(|r| Posterior([r[0], r[1], r[2]])).collect()
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// Inverted-dropout multipliers: `1 / keep` with probability `keep`, else 0.
fn dropout_mask<R: Rng>(rows: usize, cols: usize, rate: f64, rng: &mut R) -> Array2<f64> {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    Array2::from_shape_simple_fn((rows, cols), || if rng.gen::<f64>() < keep { scale } else { 0.0 })
}

impl Mlp {
    pub fn zeros(input_dim: usize) -> Mlp {
        Mlp {
            w1: Array2::zeros((HIDDEN1, input_dim)),
            b1: Array1::zeros(HIDDEN1),
            w2: Array2::zeros((HIDDEN2, HIDDEN1)),
            b2: Array1::zeros(HIDDEN2),
            w3: Array2::zeros((CLASSES, HIDDEN2)),
            b3: Array1::zeros(CLASSES),
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn glorot<R: Rng>(input_dim: usize, rng: &mut R) -> Mlp {
        let mut init = |fan_out: usize, fan_in: usize| {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            Array2::from_shape_simple_fn((fan_out, fan_in), || rng.gen_range(-limit..=limit))
        };
        let w1 = init(HIDDEN1, input_dim);
        let w2 = init(HIDDEN2, HIDDEN1);
        let w3 = init(CLASSES, HIDDEN2);
        Mlp { w1, b1: Array1::zeros(HIDDEN1), w2, b2: Array1::zeros(HIDDEN2), w3, b3: Array1::zeros(CLASSES) }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.ncols()
    }

    pub fn num_params(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    /// The six tensors as flat row-major slices: w1, b1, w2, b2, w3, b3.
    pub fn slices(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice().expect("standard layout"),
            self.b1.as_slice().expect("standard layout"),
            self.w2.as_slice().expect("standard layout"),
            self.b2.as_slice().expect("standard layout"),
            self.w3.as_slice().expect("standard layout"),
            self.b3.as_slice().expect("standard layout"),
        ]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 6] {
        [
            self.w1.as_slice_mut().expect("standard layout"),
            self.b1.as_slice_mut().expect("standard layout"),
            self.w2.as_slice_mut().expect("standard layout"),
            self.b2.as_slice_mut().expect("standard layout"),
            self.w3.as_slice_mut().expect("standard layout"),
            self.b3.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<(), MlpError> {
        if x.ncols() != self.input_dim() {
            return Err(MlpError::Dimension { expected: self.input_dim(), actual: x.ncols() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(MlpError::NonFinite);
        }
        Ok(())
    }

    /// Forward pass over a batch (one example per row). In train mode the
    /// dropout masks are drawn from `rng`, input mask first, row-major.
    pub fn forward_batch<R: Rng>(
        &self,
        x: ArrayView2<f64>,
        mode: Mode,
        dropout_rate: f64,
        rng: &mut R,
    ) -> Result<Cache, MlpError> {
        self.check_input(&x)?;
        let n = x.nrows();
        let dropping = mode == Mode::Train && dropout_rate > 0.0;

        let x = if dropping { &x * &dropout_mask(n, x.ncols(), dropout_rate, rng) } else { x.to_owned() };

        let z1 = x.dot(&self.w1.t()) + &self.b1;
        let mut h1 = z1.mapv(|v| v.max(0.0));
        let mask1 = if dropping { Some(dropout_mask(n, HIDDEN1, dropout_rate, rng)) } else { None };
        if let Some(m) = &mask1 {
            h1 *= m;
        }

        let h2 = (h1.dot(&self.w2.t()) + &self.b2).mapv(f64::tanh);
        let mut probs = h2.dot(&self.w3.t()) + &self.b3;
        softmax_rows(&mut probs);

        Ok(Cache { x, z1, mask1, h1, h2, probs })
    }

    /// Single-example forward pass.
    pub fn forward<R: Rng>(
        &self,
        x: &[f64],
        mode: Mode,
        dropout_rate: f64,
        rng: &mut R,
    ) -> Result<(Posterior, Cache), MlpError> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("contiguous slice");
        let cache = self.forward_batch(view, mode, dropout_rate, rng)?;
        Ok((cache.posteriors()[0], cache))
    }

    /// Eval-mode posteriors for a batch.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<Posterior>, MlpError> {
        self.check_input(&x)?;
        let h1 = (x.dot(&self.w1.t()) + &self.b1).mapv(|v| v.max(0.0));
        let h2 = (h1.dot(&self.w2.t()) + &self.b2).mapv(f64::tanh);
        let mut probs = h2.dot(&self.w3.t()) + &self.b3;
        softmax_rows(&mut probs);
        Ok(rows_to_posteriors(&probs))
    }

    /// Gradients of the mean cross-entropy over the cached batch. Dropout
    /// masks are treated as constants.
    pub fn backward(&self, cache: &Cache, labels: &[BiasLabel]) -> Gradients {
        let n = cache.probs.nrows();
        assert_eq!(n, labels.len(), "one label per cached example");

        let mut dz3 = cache.probs.clone();
        for (mut row, label) in dz3.rows_mut().into_iter().zip(labels) {
            row[label.code()] -= 1.0;
        }
        dz3 /= n as f64;

        let w3 = dz3.t().dot(&cache.h2);
        let b3 = dz3.sum_axis(Axis(0));

        let mut dz2 = dz3.dot(&self.w3);
        dz2.zip_mut_with(&cache.h2, |d, &h| *d *= 1.0 - h * h);
        let w2 = dz2.t().dot(&cache.h1);
        let b2 = dz2.sum_axis(Axis(0));

        let mut dz1 = dz2.dot(&self.w2);
        if let Some(m) = &cache.mask1 {
            dz1 *= m;
        }
        dz1.zip_mut_with(&cache.z1, |d, &z| {
            if z <= 0.0 {
                *d = 0.0;
            }
        });
        let w1 = dz1.t().dot(&cache.x);
        let b1 = dz1.sum_axis(Axis(0));

        Mlp { w1, b1, w2, b2, w3, b3 }
    }
}

/// Cross-entropy of one posterior: `-ln p[label]`, with `p` clamped at [`LOSS_FLOOR`].
pub fn loss(posterior: &Posterior, label: BiasLabel) -> f64 {
    -posterior.prob(label).max(LOSS_FLOOR).ln()
}

/// Mean cross-entropy over a batch.
pub fn mean_loss(posteriors: &[Posterior], labels: &[BiasLabel]) -> f64 {
    posteriors.iter().zip(labels).map(|(p, &l)| loss(p, l)).sum::<f64>() / posteriors.len() as f64
}

/// Serializable shape summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub input_dim: usize,
    pub hidden1: usize,
    pub hidden2: usize,
    pub classes: usize,
}
