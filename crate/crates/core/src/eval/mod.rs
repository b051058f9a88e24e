//! Channel-level cross-validation with distant supervision.
//!
//! Every video (or episode) inherits its channel's label for training; test
//! predictions are pooled back into one posterior per channel, and accuracy
//! is counted over channels.

mod aggregate;
mod experiment;
mod folds;
pub mod presets;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureError, FeatureGroup};
use crate::label::BiasLabel;
use crate::mlp::MlpError;

pub use aggregate::aggregate_posteriors;
pub use experiment::{distant_label_instances, majority_baseline, run_experiment, LabeledInstance, RunOptions};
pub use folds::{stratified_folds, FoldAssignment, DEFAULT_FOLDS};
pub use report::{render_table, ChannelPrediction, FoldResult, Report};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] MlpError),
    #[error("class {label} has {count} channels, fewer than the {k} folds")]
    ClassTooSmall { label: BiasLabel, count: usize, k: usize },
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("catalog has no channels")]
    EmptyCatalog,
    #[error("channel {channel} has no {level}-level instances")]
    NoInstances { channel: String, level: Level },
    #[error("fold {fold} has no training instances")]
    EmptyTraining { fold: usize },
    #[error("cannot aggregate an empty set of posteriors")]
    EmptyPosteriors,
    #[error("unknown experiment {name:?}; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
}

/// What the classifier is trained and applied on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Video,
    Episode,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Video => "video",
            Level::Episode => "episode",
        })
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "video" => Ok(Level::Video),
            "episode" | "episodes" => Ok(Level::Episode),
            other => Err(format!("unknown level {other:?} (expected video or episode)")),
        }
    }
}

/// How instance posteriors are pooled into a channel posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Average,
    Maximum,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Average => "average",
            Aggregation::Maximum => "maximum",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "average" | "mean" => Ok(Aggregation::Average),
            "maximum" | "max" => Ok(Aggregation::Maximum),
            other => Err(format!("unknown aggregation {other:?} (expected average or maximum)")),
        }
    }
}

/// One cross-validated configuration. An empty group list denotes the
/// majority-class baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub groups: Vec<FeatureGroup>,
    pub level: Level,
    pub aggregation: Aggregation,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, groups: impl IntoIterator<Item = FeatureGroup>, level: Level, aggregation: Aggregation, seed: u64) -> Self {
        let mut groups: Vec<FeatureGroup> = groups.into_iter().collect();
        groups.sort();
        groups.dedup();
        ExperimentSpec { name: name.into(), groups, level, aggregation, seed }
    }

    pub fn baseline(seed: u64) -> Self {
        ExperimentSpec::new("baseline", [], Level::Video, Aggregation::Average, seed)
    }

    pub fn is_baseline(&self) -> bool {
        self.groups.is_empty()
    }
}
