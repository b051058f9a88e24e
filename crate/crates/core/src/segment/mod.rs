//! Caption parsing and speech-episode extraction.
//!
//! Caption cue timing is used as a proxy for speech: episodes are fixed
//! 15-second windows anchored at cue starts, at most five per video, with
//! at least one second of silence-or-otherwise between consecutive windows.

mod episodes;
mod parse;

use serde::{Deserialize, Serialize};

pub use episodes::{
    extract_episodes, EPISODE_GAP_MS, EPISODE_LEN_MS, MAX_EPISODES_PER_VIDEO,
};
pub use parse::{parse_subtitles, to_srt, to_webvtt, ParseError, SubtitleFormat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionCue {
    pub start_ms: u64,
    pub end_ms: u64,
    pub text: String,
}

/// A normalized caption track: cues sorted by start, no zero-length cues,
/// overlapping cues merged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionTrack {
    pub video_id: String,
    pub cues: Vec<CaptionCue>,
}

impl CaptionTrack {
    /// Build a track from arbitrary cues, applying the normalization rules.
    pub fn from_cues(video_id: impl Into<String>, cues: Vec<CaptionCue>) -> CaptionTrack {
        CaptionTrack { video_id: video_id.into(), cues: normalize_cues(cues) }
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }
}

/// Sort, drop zero-length cues, and merge overlaps into their interval union.
/// Cues that merely touch (`next.start == prev.end`) stay separate.
pub(crate) fn normalize_cues(mut cues: Vec<CaptionCue>) -> Vec<CaptionCue> {
    cues.retain(|c| c.end_ms > c.start_ms);
    cues.sort_by(|a, b| a.start_ms.cmp(&b.start_ms).then(a.end_ms.cmp(&b.end_ms)));

    let mut merged: Vec<CaptionCue> = Vec::with_capacity(cues.len());
    for cue in cues {
        match merged.last_mut() {
            Some(prev) if cue.start_ms < prev.end_ms => {
                prev.end_ms = prev.end_ms.max(cue.end_ms);
                if !cue.text.is_empty() {
                    if !prev.text.is_empty() {
                        prev.text.push('\n');
                    }
                    prev.text.push_str(&cue.text);
                }
            }
            _ => merged.push(cue),
        }
    }
    merged
}

/// One fixed-length speech window inside a video's audio.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpeechEpisode {
    pub video_id: String,
    pub index: usize,
    pub start_ms: u64,
    pub end_ms: u64,
}
