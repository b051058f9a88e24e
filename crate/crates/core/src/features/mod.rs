//! The six feature groups, their ingestion and their assembly into model inputs.

mod normalize;

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;

pub use normalize::Normalizer;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("features line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("{group} for video {video_id}: expected {expected} values, got {actual}")]
    Dimension { group: FeatureGroup, video_id: String, expected: usize, actual: usize },
    #[error("{group} for video {video_id}: non-finite value at position {position}")]
    NonFinite { group: FeatureGroup, video_id: String, position: usize },
    #[error("{group} record references unknown video {video_id}")]
    UnknownVideo { group: FeatureGroup, video_id: String },
    #[error("{group} for video {video_id}: {message}")]
    EpisodeIndex { group: FeatureGroup, video_id: String, message: String },
    #[error("duplicate {group} record for video {video_id}{}", episode_suffix(*.episode))]
    Duplicate { group: FeatureGroup, video_id: String, episode: Option<usize> },
    #[error("video {video_id}{}: missing feature group {group}", episode_suffix(*.episode))]
    Missing { group: FeatureGroup, video_id: String, episode: Option<usize> },
    #[error("{group} is a {scope}-scope group")]
    WrongScope { group: FeatureGroup, scope: Scope },
    #[error("cannot fit a normalizer on an empty training set")]
    EmptyTraining,
    #[error("normalizer expects {expected} dimensions, got {actual}")]
    NormalizerShape { expected: usize, actual: usize },
}

fn episode_suffix(episode: Option<usize>) -> String {
    episode.map(|i| format!(" episode {i}")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Video,
    Episode,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Video => "video",
            Scope::Episode => "episode",
        })
    }
}

/// Feature groups, declared in canonical concatenation order (the derived
/// `Ord` is that order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    /// BERT over title, description and tags.
    BertTitleDescTags,
    /// BERT over the caption text.
    BertCaptions,
    /// NELA stylistic features, 130 for the title and 130 for the description.
    Nela,
    /// views, likes, dislikes, comments, duration_s.
    NumericMeta,
    /// Per-episode speaker i-vectors.
    Ivectors,
    /// Per-episode openSMILE IS09 emotion functionals.
    OpensmileIs09,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::BertTitleDescTags,
        FeatureGroup::BertCaptions,
        FeatureGroup::Nela,
        FeatureGroup::NumericMeta,
        FeatureGroup::Ivectors,
        FeatureGroup::OpensmileIs09,
    ];

    pub fn dim(self) -> usize {
        match self {
            FeatureGroup::BertTitleDescTags | FeatureGroup::BertCaptions => 768,
            FeatureGroup::Nela => 260,
            FeatureGroup::NumericMeta => 5,
            FeatureGroup::Ivectors => 600,
            FeatureGroup::OpensmileIs09 => 385,
        }
    }

    pub fn scope(self) -> Scope {
        match self {
            FeatureGroup::Ivectors | FeatureGroup::OpensmileIs09 => Scope::Episode,
            _ => Scope::Video,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::BertTitleDescTags => "bert_title_desc_tags",
            FeatureGroup::BertCaptions => "bert_captions",
            FeatureGroup::Nela => "nela",
            FeatureGroup::NumericMeta => "numeric_meta",
            FeatureGroup::Ivectors => "ivectors",
            FeatureGroup::OpensmileIs09 => "opensmile_is09",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown feature group {s:?}"))
    }
}

/// One line of `features.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub group: FeatureGroup,
    pub video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episode_index: Option<usize>,
    pub vector: Vec<f64>,
}

impl FeatureRecord {
    /// Check dimension, finiteness and episode-index presence.
    pub fn validate(&self) -> Result<(), FeatureError> {
        let group = self.group;
        if self.vector.len() != group.dim() {
            return Err(FeatureError::Dimension {
                group,
                video_id: self.video_id.clone(),
                expected: group.dim(),
                actual: self.vector.len(),
            });
        }
        if let Some(position) = self.vector.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::NonFinite { group, video_id: self.video_id.clone(), position });
        }
        let message = match (group.scope(), self.episode_index) {
            (Scope::Episode, None) => "episode-scope record without episode_index",
            (Scope::Video, Some(_)) => "video-scope record must not carry episode_index",
            (Scope::Episode, Some(i)) if i >= crate::segment::MAX_EPISODES_PER_VIDEO => "episode_index out of range",
            _ => return Ok(()),
        };
        Err(FeatureError::EpisodeIndex { group, video_id: self.video_id.clone(), message: message.into() })
    }
}

/// Which feature groups make up a model input, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureLayout {
    groups: Vec<FeatureGroup>,
}

impl FeatureLayout {
    /// Sorts into canonical order and removes duplicates.
    pub fn new(groups: impl IntoIterator<Item = FeatureGroup>) -> FeatureLayout {
        let mut groups: Vec<FeatureGroup> = groups.into_iter().collect();
        groups.sort();
        groups.dedup();
        FeatureLayout { groups }
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn dim(&self) -> usize {
        self.groups.iter().map(|g| g.dim()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `(group, offset)` pairs.
    pub fn segments(&self) -> impl Iterator<Item = (FeatureGroup, usize)> + '_ {
        self.groups.iter().scan(0, |offset, &g| {
            let start = *offset;
            *offset += g.dim();
            Some((g, start))
        })
    }
}

/// What a classifier instance is: a whole video, or one of its episodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKey {
    Video(String),
    Episode(String, usize),
}

impl InstanceKey {
    pub fn video_id(&self) -> &str {
        match self {
            InstanceKey::Video(v) | InstanceKey::Episode(v, _) => v,
        }
    }

    pub fn episode(&self) -> Option<usize> {
        match self {
            InstanceKey::Video(_) => None,
            InstanceKey::Episode(_, i) => Some(*i),
        }
    }
}

/// Concatenated, unnormalized features with per-group presence flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub values: Vec<f64>,
    pub present: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    #[default]
    Error,
    ZeroFill,
}

impl FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(MissingPolicy::Error),
            "zero_fill" => Ok(MissingPolicy::ZeroFill),
            other => Err(format!("unknown missing policy {other:?} (expected error or zero_fill)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub records: usize,
    pub skipped: usize,
}

/// Validated feature vectors keyed by (group, video[, episode]).
#[derive(Debug, Clone, Default)]
pub struct FeatureStore {
    video_scope: BTreeMap<(FeatureGroup, String), Vec<f64>>,
    episode_scope: BTreeMap<(FeatureGroup, String), BTreeMap<usize, Vec<f64>>>,
}

impl FeatureStore {
    pub fn new() -> FeatureStore {
        FeatureStore::default()
    }

    /// Read `features.jsonl`. Records of videos the catalog skipped (excluded
    /// channel labels) are dropped and counted.
    pub fn ingest<R: BufRead>(reader: R, catalog: &Catalog) -> Result<(FeatureStore, IngestStats), FeatureError> {
        let mut store = FeatureStore::new();
        let mut stats = IngestStats::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| FeatureError::Json { line: i + 1, message: e.to_string() })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: FeatureRecord =
                serde_json::from_str(&line).map_err(|e| FeatureError::Json { line: i + 1, message: e.to_string() })?;
            if catalog.is_skipped_video(&record.video_id) {
                stats.skipped += 1;
                continue;
            }
            store.insert(record, catalog)?;
            stats.records += 1;
        }
        Ok((store, stats))
    }

    pub fn ingest_file(path: &Path, catalog: &Catalog) -> Result<(FeatureStore, IngestStats), FeatureError> {
        let file = std::fs::File::open(path).map_err(|source| FeatureError::Io { path: path.to_path_buf(), source })?;
        FeatureStore::ingest(std::io::BufReader::new(file), catalog)
    }

    pub fn insert(&mut self, record: FeatureRecord, catalog: &Catalog) -> Result<(), FeatureError> {
        record.validate()?;
        let FeatureRecord { group, video_id, episode_index, vector } = record;
        if catalog.video(&video_id).is_none() {
            return Err(FeatureError::UnknownVideo { group, video_id });
        }
        let duplicate = || FeatureError::Duplicate { group, video_id: video_id.clone(), episode: episode_index };
        match episode_index {
            None => {
                if self.video_scope.contains_key(&(group, video_id.clone())) {
                    return Err(duplicate());
                }
                self.video_scope.insert((group, video_id), vector);
            }
            Some(i) => {
                let episodes = self.episode_scope.entry((group, video_id.clone())).or_default();
                if episodes.contains_key(&i) {
                    return Err(duplicate());
                }
                episodes.insert(i, vector);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.video_scope.len() + self.episode_scope.values().map(BTreeMap::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn video_vector(&self, group: FeatureGroup, video_id: &str) -> Option<&[f64]> {
        self.video_scope.get(&(group, video_id.to_string())).map(Vec::as_slice)
    }

    pub fn episode_vector(&self, group: FeatureGroup, video_id: &str, episode: usize) -> Option<&[f64]> {
        self.episode_scope.get(&(group, video_id.to_string()))?.get(&episode).map(Vec::as_slice)
    }

    /// Episode indices that have a record for this group.
    pub fn episode_indices(&self, group: FeatureGroup, video_id: &str) -> Vec<usize> {
        self.episode_scope
            .get(&(group, video_id.to_string()))
            .map(|m| m.keys().copied().collect())
            .unwrap_or_default()
    }

    /// All `(video_id, episode_index)` pairs with at least one episode-scope record.
    pub fn episode_keys(&self) -> Vec<(String, usize)> {
        let mut keys: Vec<(String, usize)> = self
            .episode_scope
            .iter()
            .flat_map(|((_, v), eps)| eps.keys().map(move |&i| (v.clone(), i)))
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    /// Component-wise mean over a video's episode vectors for an episode-scope
    /// group. `Ok(None)` when the video has no episodes for the group.
    pub fn aggregate_to_video(&self, group: FeatureGroup, video_id: &str) -> Result<Option<Vec<f64>>, FeatureError> {
        if group.scope() != Scope::Episode {
            return Err(FeatureError::WrongScope { group, scope: group.scope() });
        }
        let Some(episodes) = self.episode_scope.get(&(group, video_id.to_string())).filter(|m| !m.is_empty()) else {
            return Ok(None);
        };
        let mut sum = vec![0.0; group.dim()];
        for v in episodes.values() {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        let n = episodes.len() as f64;
        Ok(Some(sum.into_iter().map(|s| s / n).collect()))
    }

    /// The unnormalized group vector for an instance: video-scope groups are
    /// shared by a video's episodes; episode-scope groups are averaged for
    /// video instances and taken as-is for episode instances.
    fn group_vector(&self, group: FeatureGroup, key: &InstanceKey) -> Option<Vec<f64>> {
        match (group.scope(), key) {
            (Scope::Video, k) => self.video_vector(group, k.video_id()).map(<[f64]>::to_vec),
            (Scope::Episode, InstanceKey::Video(v)) => self.aggregate_to_video(group, v).ok().flatten(),
            (Scope::Episode, InstanceKey::Episode(v, i)) => self.episode_vector(group, v, *i).map(<[f64]>::to_vec),
        }
    }

    /// Concatenate the layout's groups without normalization.
    pub fn raw_row(&self, key: &InstanceKey, layout: &FeatureLayout, policy: MissingPolicy) -> Result<RawRow, FeatureError> {
        let mut values = Vec::with_capacity(layout.dim());
        let mut present = Vec::with_capacity(layout.groups().len());
        for &group in layout.groups() {
            match self.group_vector(group, key) {
                Some(v) => {
                    values.extend_from_slice(&v);
                    present.push(true);
                }
                None if policy == MissingPolicy::ZeroFill => {
                    values.extend(std::iter::repeat_n(0.0, group.dim()));
                    present.push(false);
                }
                None => {
                    return Err(FeatureError::Missing {
                        group,
                        video_id: key.video_id().to_string(),
                        episode: key.episode(),
                    })
                }
            }
        }
        Ok(RawRow { values, present })
    }

    /// Fit z-score parameters over the training instances.
    pub fn fit_normalizer(
        &self,
        layout: &FeatureLayout,
        training: &[InstanceKey],
        policy: MissingPolicy,
    ) -> Result<Normalizer, FeatureError> {
        let rows = training
            .iter()
            .map(|k| self.raw_row(k, layout, policy))
            .collect::<Result<Vec<_>, _>>()?;
        Normalizer::fit(layout, &rows)
    }

    /// Normalized model input for one instance. Absent groups (under
    /// `ZeroFill`) are zero after normalization, i.e. imputed at the mean.
    pub fn assemble(
        &self,
        key: &InstanceKey,
        layout: &FeatureLayout,
        normalizer: &Normalizer,
        policy: MissingPolicy,
    ) -> Result<Vec<f64>, FeatureError> {
        let row = self.raw_row(key, layout, policy)?;
        normalizer.apply(layout, &row)
    }
}
