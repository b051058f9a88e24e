use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use ytbias::segment::{extract_episodes, parse_subtitles, SubtitleFormat};

#[derive(Debug, Deserialize)]
struct DurationLine {
    #[serde(alias = "id")]
    video_id: String,
    duration_ms: Option<u64>,
    duration_s: Option<u64>,
}

/// Audio durations in milliseconds, from JSON lines carrying `video_id` (or
/// `id`) and `duration_ms` or `duration_s`. A videos manifest works as is.
pub fn read_durations(path: &Path) -> Result<BTreeMap<String, u64>> {
    let file = File::open(path).with_context(|| format!("cannot open durations file {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let d: DurationLine = serde_json::from_str(&line).with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        let ms = match (d.duration_ms, d.duration_s) {
            (Some(ms), _) => ms,
            (None, Some(s)) => s * 1000,
            (None, None) => bail!("{}: line {}: needs duration_ms or duration_s", path.display(), i + 1),
        };
        if ms == 0 {
            bail!("{}: line {}: duration of {} is zero", path.display(), i + 1, d.video_id);
        }
        out.insert(d.video_id, ms);
    }
    Ok(out)
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct SegmentSummary {
    pub videos: usize,
    pub episodes: usize,
    pub failed: usize,
}

impl SegmentSummary {
    pub fn mean_per_video(&self) -> f64 {
        if self.videos == 0 { 0.0 } else { self.episodes as f64 / self.videos as f64 }
    }
}

fn caption_files(dir: &Path, format: SubtitleFormat) -> Result<Vec<PathBuf>> {
    let wanted: &[&str] = match format {
        SubtitleFormat::Srt => &["srt"],
        SubtitleFormat::Webvtt => &["vtt", "webvtt"],
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot read subtitle directory {}", dir.display()))? {
        let path = entry?.path();
        let matches = path.extension().and_then(|e| e.to_str()).is_some_and(|e| wanted.iter().any(|w| e.eq_ignore_ascii_case(w)));
        if path.is_file() && matches {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Segment every `<video_id>.<ext>` caption file in `dir` and write the
/// episodes as JSON lines to `output`. Files that cannot be read, parsed or
/// matched to a duration are skipped with a warning.
pub fn run(dir: &Path, durations: &Path, format: SubtitleFormat, output: &Path) -> Result<SegmentSummary> {
    let durations = read_durations(durations)?;
    let files = caption_files(dir, format)?;
    let mut summary = SegmentSummary::default();
    let mut episodes = Vec::new();

    for path in &files {
        let video_id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let Some(&duration) = durations.get(&video_id) else {
            log::warn!("{}: no duration for video {video_id}", path.display());
            summary.failed += 1;
            continue;
        };
        let raw = match std::fs::read(path) {
            Ok(raw) => raw,
            Err(e) => {
                log::warn!("{}: {e}", path.display());
                summary.failed += 1;
                continue;
            }
        };
        match parse_subtitles(&video_id, &raw, format) {
            Ok(track) => {
                let found = extract_episodes(&track, duration);
                summary.videos += 1;
                summary.episodes += found.len();
                episodes.extend(found);
            }
            Err(e) => {
                log::warn!("{}: {e}", path.display());
                summary.failed += 1;
            }
        }
    }
    if !files.is_empty() && summary.videos == 0 {
        bail!("all {} caption files in {} failed", files.len(), dir.display());
    }

    if let Some(parent) = output.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let file = File::create(output).with_context(|| format!("cannot write {}", output.display()))?;
    let mut w = BufWriter::new(file);
    for ep in &episodes {
        serde_json::to_writer(&mut w, ep)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(summary)
}
