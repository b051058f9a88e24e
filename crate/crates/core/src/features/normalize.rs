use serde::{Deserialize, Serialize};

use super::{FeatureError, FeatureLayout, RawRow};

/// Per-dimension z-score parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn identity(dim: usize) -> Normalizer {
        Normalizer { mean: vec![0.0; dim], std: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Fit over training rows. Only rows where a group is present contribute
    /// to that group's dimensions. Constant dimensions (and dimensions never
    /// observed) get std 1, so they normalize to exactly 0.
    pub fn fit(layout: &FeatureLayout, rows: &[RawRow]) -> Result<Normalizer, FeatureError> {
        if rows.is_empty() {
            return Err(FeatureError::EmptyTraining);
        }
        let dim = layout.dim();
        let mut mean = vec![0.0; dim];
        let mut std = vec![1.0; dim];

        for (slot, (group, offset)) in layout.segments().enumerate() {
            let present: Vec<&RawRow> = rows.iter().filter(|r| r.present[slot]).collect();
            if present.is_empty() {
                continue;
            }
            let n = present.len() as f64;
            for d in offset..offset + group.dim() {
                let first = present[0].values[d];
                if present.iter().all(|r| r.values[d] == first) {
                    mean[d] = first;
                    continue;
                }
                let m = present.iter().map(|r| r.values[d]).sum::<f64>() / n;
                let var = present.iter().map(|r| (r.values[d] - m).powi(2)).sum::<f64>() / n;
                mean[d] = m;
                let s = var.sqrt();
                std[d] = if s > 0.0 && s.is_finite() { s } else { 1.0 };
            }
        }
        Ok(Normalizer { mean, std })
    }

    pub fn apply(&self, layout: &FeatureLayout, row: &RawRow) -> Result<Vec<f64>, FeatureError> {
        if row.values.len() != self.dim() || layout.dim() != self.dim() {
            return Err(FeatureError::NormalizerShape { expected: self.dim(), actual: row.values.len() });
        }
        let mut out = vec![0.0; self.dim()];
        for (slot, (group, offset)) in layout.segments().enumerate() {
            if !row.present[slot] {
                continue;
            }
            let range = offset..offset + group.dim();
            let (values, mean, std) = (&row.values[range.clone()], &self.mean[range.clone()], &self.std[range.clone()]);
            for (o, ((v, m), s)) in out[range].iter_mut().zip(values.iter().zip(mean).zip(std)) {
                *o = (v - m) / s;
            }
        }
        Ok(out)
    }
}
