//! Political-bias prediction for YouTube news channels.
//!
//! The pipeline has four stages:
//!
//! ```text
//! captions -> speech episodes -> per-episode / per-video features
//!          -> feed-forward classifier (distant supervision on videos or episodes)
//!          -> channel posterior (average or maximum) -> left / center / right
//! ```
//!
//! * [`segment`] parses SRT/WebVTT caption tracks and cuts fixed 15 s speech
//!   episodes from caption timing.
//! * [`catalog`] loads the channel/video manifest and collapses the 7-way
//!   MBFC annotation onto the 3-way target.
//! * [`features`] validates, averages, normalizes and concatenates the six
//!   feature groups.
//! * [`mlp`] is the 128-ReLU / 64-tanh / softmax network trained with Adagrad.
//! * [`eval`] runs stratified channel-level cross-validation and the preset
//!   experiment matrix.

pub mod catalog;
pub mod eval;
pub mod features;
pub mod label;
pub mod mlp;
pub mod segment;
pub mod synthetic;

pub use catalog::{Catalog, CatalogError, Channel, ChannelStats, Video, VideoMetadata};
pub use eval::{
    aggregate_posteriors, distant_label_instances, majority_baseline, run_experiment,
    stratified_folds, Aggregation, EvalError, ExperimentSpec, FoldAssignment, Level, Report,
};
pub use features::{FeatureError, FeatureGroup, FeatureRecord, FeatureStore, MissingPolicy, Normalizer};
pub use label::{BiasLabel, Posterior, RawMbfcLabel};
pub use mlp::{Mlp, MlpError, TrainConfig};
pub use segment::{extract_episodes, parse_subtitles, CaptionCue, CaptionTrack, SpeechEpisode, SubtitleFormat};
