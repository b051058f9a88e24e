use super::{Gradients, Mlp};

/// Adagrad: per-coordinate `acc += g²; p -= lr · g / (sqrt(acc) + eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adagrad {
    pub learning_rate: f64,
    pub epsilon: f64,
    accumulator: Mlp,
}

impl Adagrad {
    /// Zero-initialized accumulator shaped like `params`.
    pub fn new(params: &Mlp, learning_rate: f64, epsilon: f64) -> Adagrad {
        Adagrad { learning_rate, epsilon, accumulator: Mlp::zeros(params.input_dim()) }
    }

    pub fn accumulator(&self) -> &Mlp {
        &self.accumulator
    }

    /// Current per-coordinate step multiplier `lr / (sqrt(acc) + eps)` for
    /// tensor `tensor` (0..6, in [`Mlp::slices`] order) at `index`.
    pub fn effective_rate(&self, tensor: usize, index: usize) -> f64 {
        self.learning_rate / (self.accumulator.slices()[tensor][index].sqrt() + self.epsilon)
    }

    pub fn step(&mut self, params: &mut Mlp, grads: &Gradients) {
        let (lr, eps) = (self.learning_rate, self.epsilon);
        for ((p, a), g) in params.slices_mut().into_iter().zip(self.accumulator.slices_mut()).zip(grads.slices()) {
            for ((p, a), &g) in p.iter_mut().zip(a.iter_mut()).zip(g) {
                *a += g * g;
                if g != 0.0 {
                    *p -= lr * g / (a.sqrt() + eps);
                }
            }
        }
    }
}
