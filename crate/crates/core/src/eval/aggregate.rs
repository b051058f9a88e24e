use super::{Aggregation, EvalError};
use crate::label::{BiasLabel, Posterior};

/// Pool one channel's instance posteriors.
///
/// `Average` is the component-wise mean. `Maximum` takes the component-wise
/// max and renormalizes it to sum to one. Prediction is the argmax, ties
/// toward the lowest class code; renormalization does not move the argmax.
/// A lone posterior is returned as is by both methods.
pub fn aggregate_posteriors(posteriors: &[Posterior], method: Aggregation) -> Result<(Posterior, BiasLabel), EvalError> {
    if posteriors.is_empty() {
        return Err(EvalError::EmptyPosteriors);
    }
    if let [only] = posteriors {
        return Ok((*only, only.predicted()));
    }
    let pooled = match method {
        Aggregation::Average => {
            let mut sum = [0.0; 3];
            for p in posteriors {
                for (s, v) in sum.iter_mut().zip(p.0) {
                    *s += v;
                }
            }
            let n = posteriors.len() as f64;
            Posterior(sum.map(|s| s / n))
        }
        Aggregation::Maximum => {
            let mut max = [f64::NEG_INFINITY; 3];
            for p in posteriors {
                for (m, v) in max.iter_mut().zip(p.0) {
                    *m = m.max(v);
                }
            }
            Posterior::from_masses(max).unwrap_or(Posterior::UNIFORM)
        }
    };
    Ok((pooled, pooled.predicted()))
}
