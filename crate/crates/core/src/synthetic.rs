//! Generated manifests with a controllable class signal, for tests and demos.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::catalog::{Catalog, CatalogError};
use crate::features::{FeatureError, FeatureGroup, FeatureRecord, FeatureStore, Scope};
use crate::label::BiasLabel;
use crate::segment::{SpeechEpisode, EPISODE_GAP_MS, EPISODE_LEN_MS};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    /// Channels per class, in code order (left, center, right).
    pub channels_per_class: [usize; 3],
    pub videos_per_channel: usize,
    pub episodes_per_video: usize,
    /// Group whose first `signal_dims` dimensions carry the class signal.
    pub signal_group: FeatureGroup,
    pub signal_dims: usize,
    /// Distance between adjacent class means, in noise standard deviations.
    pub separation: f64,
    /// Further groups filled with pure N(0, 1) noise.
    pub noise_groups: Vec<FeatureGroup>,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            channels_per_class: [20, 20, 20],
            videos_per_channel: 4,
            episodes_per_video: 3,
            signal_group: FeatureGroup::OpensmileIs09,
            signal_dims: 20,
            separation: 10.0,
            noise_groups: Vec::new(),
            seed: 0,
        }
    }
}

/// The four JSON-lines files of a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub channels: String,
    pub videos: String,
    pub episodes: String,
    pub features: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SyntheticError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone)]
pub struct ManifestPaths {
    pub channels: PathBuf,
    pub videos: PathBuf,
    pub episodes: PathBuf,
    pub features: PathBuf,
}

impl SyntheticDataset {
    pub fn generate(config: &SyntheticConfig) -> SyntheticDataset {
        assert!(config.signal_dims <= config.signal_group.dim(), "signal_dims exceeds group dimension");
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut out = SyntheticDataset { channels: String::new(), videos: String::new(), episodes: String::new(), features: String::new() };

        let mut groups = vec![config.signal_group];
        groups.extend(config.noise_groups.iter().copied().filter(|g| *g != config.signal_group));
        let raw_labels = [["left", "extreme-left"], ["center", "center"], ["right", "extreme-right"]];

        for label in BiasLabel::ALL {
            for c in 0..config.channels_per_class[label.code()] {
                let channel_id = format!("{}-{c:03}", label.as_str());
                let raw = raw_labels[label.code()][c % 2];
                let _ = writeln!(
                    out.channels,
                    "{}",
                    serde_json::json!({
                        "id": channel_id,
                        "name": format!("{channel_id} news"),
                        "youtube_url": format!("https://www.youtube.com/user/{channel_id}"),
                        "label_raw": raw,
                    })
                );
                for v in 0..config.videos_per_channel {
                    let video_id = format!("{channel_id}-v{v:02}");
                    let duration_s: u64 = rng.gen_range(120..1200);
                    let _ = writeln!(
                        out.videos,
                        "{}",
                        serde_json::json!({
                            "id": video_id,
                            "channel_id": channel_id,
                            "title": format!("video {v} of {channel_id}"),
                            "description": "",
                            "tags": ["news"],
                            "views": rng.gen_range(0u64..1_000_000),
                            "likes": rng.gen_range(0u64..10_000),
                            "dislikes": rng.gen_range(0u64..1_000),
                            "comments": rng.gen_range(0u64..5_000),
                            "duration_s": duration_s,
                        })
                    );
                    for e in 0..config.episodes_per_video {
                        let start_ms = e as u64 * (EPISODE_LEN_MS + EPISODE_GAP_MS);
                        let ep = SpeechEpisode { video_id: video_id.clone(), index: e, start_ms, end_ms: start_ms + EPISODE_LEN_MS };
                        let _ = writeln!(out.episodes, "{}", serde_json::to_string(&ep).expect("episode serializes"));
                    }
                    for &group in &groups {
                        let signal = if group == config.signal_group { config.signal_dims } else { 0 };
                        let mean = label.code() as f64 * config.separation;
                        let vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                            (0..group.dim())
                                .map(|d| {
                                    let noise: f64 = StandardNormal.sample(rng);
                                    if d < signal { mean + noise } else { noise }
                                })
                                .collect()
                        };
                        let records: Vec<FeatureRecord> = match group.scope() {
                            Scope::Video => vec![FeatureRecord { group, video_id: video_id.clone(), episode_index: None, vector: vector(&mut rng) }],
                            Scope::Episode => (0..config.episodes_per_video)
                                .map(|e| FeatureRecord { group, video_id: video_id.clone(), episode_index: Some(e), vector: vector(&mut rng) })
                                .collect(),
                        };
                        for r in records {
                            let _ = writeln!(out.features, "{}", serde_json::to_string(&r).expect("record serializes"));
                        }
                    }
                }
            }
        }
        out
    }

    /// Build the in-memory catalog (with episodes) and feature store.
    pub fn load(&self) -> Result<(Catalog, FeatureStore), SyntheticError> {
        let mut catalog = Catalog::from_readers(self.channels.as_bytes(), self.videos.as_bytes())?;
        let episodes: Vec<SpeechEpisode> = self
            .episodes
            .lines()
            .map(|l| serde_json::from_str(l).expect("generated episodes parse"))
            .collect();
        catalog.attach_episodes(episodes)?;
        let (store, _) = FeatureStore::ingest(self.features.as_bytes(), &catalog)?;
        Ok((catalog, store))
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<ManifestPaths> {
        std::fs::create_dir_all(dir)?;
        let paths = ManifestPaths {
            channels: dir.join("channels.jsonl"),
            videos: dir.join("videos.jsonl"),
            episodes: dir.join("episodes.jsonl"),
            features: dir.join("features.jsonl"),
        };
        std::fs::write(&paths.channels, &self.channels)?;
        std::fs::write(&paths.videos, &self.videos)?;
        std::fs::write(&paths.episodes, &self.episodes)?;
        std::fs::write(&paths.features, &self.features)?;
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_manifest_loads_with_expected_counts() {
        let config = SyntheticConfig { channels_per_class: [5, 6, 7], videos_per_channel: 2, episodes_per_video: 3, noise_groups: vec![FeatureGroup::NumericMeta], ..Default::default() };
        let data = SyntheticDataset::generate(&config);
        let (catalog, store) = data.load().unwrap();
        let s = catalog.summary();
        assert_eq!((s.channels, s.left, s.center, s.right, s.videos, s.episodes), (18, 5, 6, 7, 36, 108));
        // 3 opensmile episodes + 1 metadata record per video
        assert_eq!(store.len(), 36 * 4);
        assert_eq!(SyntheticDataset::generate(&config), data);
    }
}
