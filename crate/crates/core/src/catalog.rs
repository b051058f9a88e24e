//! Channel / video / episode manifest with referential integrity.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::label::{BiasLabel, RawMbfcLabel};
use crate::segment::SpeechEpisode;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file} line {line}: {message}")]
    Json { file: String, line: usize, message: String },
    #[error("{file} line {line}: channel {channel}: {source}")]
    Label { file: String, line: usize, channel: String, source: crate::label::UnknownLabel },
    #[error("duplicate channel id {0}")]
    DuplicateChannel(String),
    #[error("duplicate video id {0}")]
    DuplicateVideo(String),
    #[error("video {video} references unknown channel {channel}")]
    DanglingChannel { video: String, channel: String },
    #[error("video {video}: {reason}")]
    InvalidVideo { video: String, reason: String },
    #[error("episode {index} references unknown video {video}")]
    DanglingEpisode { video: String, index: usize },
    #[error("duplicate episode {index} of video {video}")]
    DuplicateEpisode { video: String, index: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub views: Option<u64>,
    pub video_count: Option<u64>,
    pub subscribers: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Channel {
    pub id: String,
    pub name: String,
    pub youtube_url: String,
    pub raw_label: RawMbfcLabel,
    pub label: BiasLabel,
    pub description: Option<String>,
    pub stats: Option<ChannelStats>,
}

/// The five per-video numbers, in feature order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMetadata {
    pub views: u64,
    pub likes: u64,
    pub dislikes: u64,
    pub comments: u64,
    pub duration_s: u64,
}

impl VideoMetadata {
    pub fn as_vector(&self) -> [f64; 5] {
        [self.views as f64, self.likes as f64, self.dislikes as f64, self.comments as f64, self.duration_s as f64]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Video {
    pub id: String,
    pub channel_id: String,
    pub title: String,
    pub description: String,
    pub tags: Vec<String>,
    pub metadata: VideoMetadata,
}

#[derive(Deserialize)]
struct ChannelLine {
    id: String,
    name: String,
    youtube_url: String,
    label_raw: String,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    stats: Option<ChannelStats>,
}

#[derive(Deserialize)]
struct VideoLine {
    id: String,
    channel_id: String,
    title: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    tags: Vec<String>,
    views: u64,
    likes: u64,
    dislikes: u64,
    comments: u64,
    duration_s: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogSummary {
    pub channels: usize,
    pub left: usize,
    pub center: usize,
    pub right: usize,
    pub videos: usize,
    pub episodes: usize,
    pub excluded_channels: usize,
    pub skipped_videos: usize,
}

impl CatalogSummary {
    pub fn mean_videos_per_channel(&self) -> f64 {
        if self.channels == 0 { 0.0 } else { self.videos as f64 / self.channels as f64 }
    }

    pub fn mean_episodes_per_video(&self) -> f64 {
        if self.videos == 0 { 0.0 } else { self.episodes as f64 / self.videos as f64 }
    }
}

/// Immutable after construction; every video resolves to a channel with a
/// 3-way label. Channels whose MBFC label is center-left/center-right are
/// dropped together with their videos.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    channels: BTreeMap<String, Channel>,
    videos: BTreeMap<String, Video>,
    videos_by_channel: BTreeMap<String, Vec<String>>,
    episodes: BTreeMap<String, Vec<SpeechEpisode>>,
    excluded_channels: BTreeSet<String>,
    skipped_videos: BTreeSet<String>,
}

fn read_lines<R: BufRead>(reader: R, file: &str) -> Result<Vec<(usize, String)>, CatalogError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CatalogError::Json { file: file.to_string(), line: i + 1, message: e.to_string() })?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn parse_line<T: for<'de> Deserialize<'de>>(file: &str, line: usize, text: &str) -> Result<T, CatalogError> {
    serde_json::from_str(text).map_err(|e| CatalogError::Json { file: file.to_string(), line, message: e.to_string() })
}

fn open(path: &Path) -> Result<BufReader<File>, CatalogError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })
}

impl Catalog {
    /// Load `channels.jsonl` and `videos.jsonl`.
    pub fn load(channel_file: &Path, video_file: &Path) -> Result<Catalog, CatalogError> {
        Catalog::from_readers(open(channel_file)?, open(video_file)?)
    }

    pub fn from_readers<C: BufRead, V: BufRead>(channels: C, videos: V) -> Result<Catalog, CatalogError> {
        let mut catalog = Catalog::default();
        let mut seen_channels = BTreeSet::new();

        for (line, text) in read_lines(channels, "channels")? {
            let raw: ChannelLine = parse_line("channels", line, &text)?;
            if !seen_channels.insert(raw.id.clone()) {
                return Err(CatalogError::DuplicateChannel(raw.id));
            }
            let raw_label: RawMbfcLabel = raw.label_raw.parse().map_err(|source| CatalogError::Label {
                file: "channels".into(),
                line,
                channel: raw.id.clone(),
                source,
            })?;
            match raw_label.normalize() {
                Some(label) => {
                    catalog.channels.insert(
                        raw.id.clone(),
                        Channel {
                            id: raw.id,
                            name: raw.name,
                            youtube_url: raw.youtube_url,
                            raw_label,
                            label,
                            description: raw.description,
                            stats: raw.stats,
                        },
                    );
                }
                None => {
                    catalog.excluded_channels.insert(raw.id);
                }
            }
        }

        let mut seen_videos = BTreeSet::new();
        for (line, text) in read_lines(videos, "videos")? {
            let raw: VideoLine = parse_line("videos", line, &text)?;
            if !seen_videos.insert(raw.id.clone()) {
                return Err(CatalogError::DuplicateVideo(raw.id));
            }
            if raw.duration_s == 0 {
                return Err(CatalogError::InvalidVideo { video: raw.id, reason: "duration_s must be positive".into() });
            }
            if catalog.excluded_channels.contains(&raw.channel_id) {
                log::warn!("skipping video {}: channel {} has an excluded label", raw.id, raw.channel_id);
                catalog.skipped_videos.insert(raw.id);
                continue;
            }
            if !catalog.channels.contains_key(&raw.channel_id) {
                return Err(CatalogError::DanglingChannel { video: raw.id, channel: raw.channel_id });
            }
            catalog.videos.insert(
                raw.id.clone(),
                Video {
                    id: raw.id,
                    channel_id: raw.channel_id,
                    title: raw.title,
                    description: raw.description,
                    tags: raw.tags,
                    metadata: VideoMetadata {
                        views: raw.views,
                        likes: raw.likes,
                        dislikes: raw.dislikes,
                        comments: raw.comments,
                        duration_s: raw.duration_s,
                    },
                },
            );
        }

        for video in catalog.videos.values() {
            catalog.videos_by_channel.entry(video.channel_id.clone()).or_default().push(video.id.clone());
        }
        Ok(catalog)
    }

    /// Attach speech episodes (e.g. the output of segmentation). Episodes of
    /// skipped videos are ignored; unknown videos and duplicate indices are errors.
    pub fn attach_episodes<I>(&mut self, episodes: I) -> Result<(), CatalogError>
    where
        I: IntoIterator<Item = SpeechEpisode>,
    {
        for ep in episodes {
            if self.skipped_videos.contains(&ep.video_id) {
                continue;
            }
            if !self.videos.contains_key(&ep.video_id) {
                return Err(CatalogError::DanglingEpisode { video: ep.video_id, index: ep.index });
            }
            let list = self.episodes.entry(ep.video_id.clone()).or_default();
            if list.iter().any(|e| e.index == ep.index) {
                return Err(CatalogError::DuplicateEpisode { video: ep.video_id, index: ep.index });
            }
            list.push(ep);
        }
        for list in self.episodes.values_mut() {
            list.sort_by_key(|e| e.index);
        }
        Ok(())
    }

    /// Read episodes from a JSON-lines file of `{"video_id","index","start_ms","end_ms"}`.
    pub fn attach_episode_file(&mut self, path: &Path) -> Result<(), CatalogError> {
        let file = path.display().to_string();
        let mut eps = Vec::new();
        for (line, text) in read_lines(open(path)?, &file)? {
            eps.push(parse_line::<SpeechEpisode>(&file, line, &text)?);
        }
        self.attach_episodes(eps)
    }

    pub fn channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.values()
    }

    pub fn channel(&self, id: &str) -> Option<&Channel> {
        self.channels.get(id)
    }

    pub fn videos(&self) -> impl Iterator<Item = &Video> {
        self.videos.values()
    }

    pub fn video(&self, id: &str) -> Option<&Video> {
        self.videos.get(id)
    }

    /// Video ids of a channel, sorted.
    pub fn videos_of(&self, channel_id: &str) -> &[String] {
        self.videos_by_channel.get(channel_id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Episodes of a video, sorted by index.
    pub fn episodes_of(&self, video_id: &str) -> &[SpeechEpisode] {
        self.episodes.get(video_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn label_of_video(&self, video_id: &str) -> Option<BiasLabel> {
        let video = self.videos.get(video_id)?;
        self.channels.get(&video.channel_id).map(|c| c.label)
    }

    pub fn is_skipped_video(&self, video_id: &str) -> bool {
        self.skipped_videos.contains(video_id)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_videos(&self) -> usize {
        self.videos.len()
    }

    pub fn num_episodes(&self) -> usize {
        self.episodes.values().map(Vec::len).sum()
    }

    pub fn summary(&self) -> CatalogSummary {
        let mut counts = [0usize; 3];
        for c in self.channels.values() {
            counts[c.label.code()] += 1;
        }
        CatalogSummary {
            channels: self.channels.len(),
            left: counts[0],
            center: counts[1],
            right: counts[2],
            videos: self.videos.len(),
            episodes: self.num_episodes(),
            excluded_channels: self.excluded_channels.len(),
            skipped_videos: self.skipped_videos.len(),
        }
    }
}

/// Free-function form of [`Catalog::load`].
pub fn load_manifest(channel_file: &Path, video_file: &Path) -> Result<Catalog, CatalogError> {
    Catalog::load(channel_file, video_file)
}
