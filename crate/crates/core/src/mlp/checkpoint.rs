use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Mlp, MlpError, Shape, TrainConfig, CLASSES, HIDDEN1, HIDDEN2};
use crate::features::{FeatureLayout, Normalizer};

pub const CHECKPOINT_FORMAT: &str = "ytbias-mlp";
pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON model file: shapes, flat row-major weights, the training config,
/// and optionally the feature layout and normalizer the model expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub shape: Shape,
    pub config: TrainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<FeatureLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<Normalizer>,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub w3: Vec<f64>,
    pub b3: Vec<f64>,
}

impl Checkpoint {
    pub fn new(model: &Mlp, config: TrainConfig) -> Checkpoint {
        let [w1, b1, w2, b2, w3, b3] = model.slices().map(<[f64]>::to_vec);
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            shape: Shape { input_dim: model.input_dim(), hidden1: HIDDEN1, hidden2: HIDDEN2, classes: CLASSES },
            config,
            layout: None,
            normalizer: None,
            w1,
            b1,
            w2,
            b2,
            w3,
            b3,
        }
    }

    pub fn model(&self) -> Result<Mlp, MlpError> {
        let bad = |m: String| MlpError::Checkpoint(m);
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", self.format, self.version)));
        }
        let s = self.shape;
        if (s.hidden1, s.hidden2, s.classes) != (HIDDEN1, HIDDEN2, CLASSES) {
            return Err(bad(format!("unsupported layer sizes {}/{}/{}", s.hidden1, s.hidden2, s.classes)));
        }
        let matrix = |name: &str, rows: usize, cols: usize, v: &[f64]| {
            Array2::from_shape_vec((rows, cols), v.to_vec()).map_err(|_| bad(format!("{name}: expected {rows}x{cols} values, got {}", v.len())))
        };
        let vector = |name: &str, len: usize, v: &[f64]| {
            if v.len() == len { Ok(Array1::from(v.to_vec())) } else { Err(bad(format!("{name}: expected {len} values, got {}", v.len()))) }
        };
        let model = Mlp {
            w1: matrix("w1", HIDDEN1, s.input_dim, &self.w1)?,
            b1: vector("b1", HIDDEN1, &self.b1)?,
            w2: matrix("w2", HIDDEN2, HIDDEN1, &self.w2)?,
            b2: vector("b2", HIDDEN2, &self.b2)?,
            w3: matrix("w3", CLASSES, HIDDEN2, &self.w3)?,
            b3: vector("b3", CLASSES, &self.b3)?,
        };
        if !model.is_finite() {
            return Err(bad("non-finite weight".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), MlpError> {
        let json = serde_json::to_string(self).map_err(|e| MlpError::Checkpoint(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| MlpError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Checkpoint, MlpError> {
        let text = std::fs::read_to_string(path).map_err(|e| MlpError::Checkpoint(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| MlpError::Checkpoint(e.to_string()))
    }
}
