use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{mean_loss, Adagrad, Mlp, MlpError, Mode};
use crate::label::BiasLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub adagrad_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 35,
            batch_size: 75,
            dropout_rate: 0.2,
            learning_rate: 0.01,
            adagrad_epsilon: 1e-8,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MlpError> {
        let problem = if self.epochs == 0 {
            "epochs must be >= 1"
        } else if self.batch_size == 0 {
            "batch_size must be >= 1"
        } else if !(0.0..1.0).contains(&self.dropout_rate) {
            "dropout_rate must be in [0, 1)"
        } else if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            "learning_rate must be positive"
        } else if !(self.adagrad_epsilon >= 0.0 && self.adagrad_epsilon.is_finite()) {
            "adagrad_epsilon must be non-negative"
        } else {
            return Ok(());
        };
        Err(MlpError::InvalidConfig(problem.into()))
    }
}

/// Train from Glorot initialization. See [`train_with_history`].
pub fn train(x: ArrayView2<f64>, labels: &[BiasLabel], config: &TrainConfig) -> Result<Mlp, MlpError> {
    train_with_history(x, labels, config).map(|(model, _)| model)
}

/// Mini-batch Adagrad. One seeded generator drives, in order: the weight
/// initialization, then per epoch the shuffle followed by each batch's
/// dropout masks. The final short batch is kept. Returns the model and the
/// mean training loss (dropout active) of every epoch.
pub fn train_with_history(
    x: ArrayView2<f64>,
    labels: &[BiasLabel],
    config: &TrainConfig,
) -> Result<(Mlp, Vec<f64>), MlpError> {
    config.validate()?;
    if x.nrows() == 0 {
        return Err(MlpError::EmptyDataset);
    }
    if x.nrows() != labels.len() {
        return Err(MlpError::LabelCount { inputs: x.nrows(), labels: labels.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(MlpError::NonFinite);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = Mlp::glorot(x.ncols(), &mut rng);
    let mut optimizer = Adagrad::new(&model, config.learning_rate, config.adagrad_epsilon);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let bx: Array2<f64> = x.select(Axis(0), batch);
            let by: Vec<BiasLabel> = batch.iter().map(|&i| labels[i]).collect();
            let cache = model.forward_batch(bx.view(), Mode::Train, config.dropout_rate, &mut rng)?;
            epoch_loss += mean_loss(&cache.posteriors(), &by) * batch.len() as f64;
            let grads = model.backward(&cache, &by);
            optimizer.step(&mut model, &grads);
        }
        history.push(epoch_loss / x.nrows() as f64);
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    /// Three well-separated Gaussian blobs in `d` dimensions.
    fn blobs(n: usize, d: usize, seed: u64) -> (Array2<f64>, Vec<BiasLabel>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let centers: Vec<Vec<f64>> = (0..3).map(|_| (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect()).collect();
        let mut x = Array2::zeros((n, d));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let c = i % 3;
            for j in 0..d {
                x[[i, j]] = centers[c][j] + noise.sample(&mut rng);
            }
            y.push(BiasLabel::ALL[c]);
        }
        (x, y)
    }

    fn accuracy(model: &Mlp, x: &Array2<f64>, y: &[BiasLabel]) -> f64 {
        let p = model.predict(x.view()).unwrap();
        p.iter().zip(y).filter(|(p, &l)| p.predicted() == l).count() as f64 / y.len() as f64
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = TrainConfig::default();
        assert_eq!((c.epochs, c.batch_size, c.dropout_rate), (35, 75, 0.2));
        assert!(c.validate().is_ok());
        assert!(TrainConfig { dropout_rate: 1.0, ..c }.validate().is_err());
        assert!(TrainConfig { epochs: 0, ..c }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..c }.validate().is_err());
        assert!(TrainConfig { learning_rate: 0.0, ..c }.validate().is_err());
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let x = Array2::<f64>::zeros((0, 4));
        assert!(matches!(train(x.view(), &[], &TrainConfig::default()), Err(MlpError::EmptyDataset)));
    }

    #[test]
    fn same_seed_same_bits() {
        let (x, y) = blobs(90, 6, 1);
        let a = train(x.view(), &y, &TrainConfig::default()).unwrap();
        let b = train(x.view(), &y, &TrainConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = train(x.view(), &y, &TrainConfig { seed: 7, ..TrainConfig::default() }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn separable_blobs_are_learned() {
        let (x, y) = blobs(50, 4, 3);
        let model = train(x.view(), &y, &TrainConfig::default()).unwrap();
        let acc = accuracy(&model, &x, &y);
        assert!(acc >= 0.98, "training accuracy {acc}");
    }

    #[test]
    fn single_example_is_overfit() {
        let x = Array2::from_shape_vec((1, 3), vec![0.3, -1.2, 0.8]).unwrap();
        let config = TrainConfig { epochs: 400, learning_rate: 0.05, ..TrainConfig::default() };
        let (model, history) = train_with_history(x.view(), &[BiasLabel::Right], &config).unwrap();
        let p = model.predict(x.view()).unwrap()[0];
        let final_loss = super::super::loss(&p, BiasLabel::Right);
        assert!(final_loss < 0.01, "loss {final_loss}");
        assert!(history.last().unwrap() < history.first().unwrap());
    }
}
