use super::{CaptionTrack, SpeechEpisode};

pub const EPISODE_LEN_MS: u64 = 15_000;
/// Minimum silence between the end of one episode and the start of the next.
pub const EPISODE_GAP_MS: u64 = 1_000;
pub const MAX_EPISODES_PER_VIDEO: usize = 5;

/// Greedy left-to-right scan over cue start times.
///
/// A start `s` is taken when `s + 15000 <= audio_duration_ms` and, after the
/// first episode, `s >= previous.end_ms + 1000`. Windows that would overrun
/// the audio are skipped rather than truncated. Episodes may begin only at a
/// cue start, never mid-cue.
pub fn extract_episodes(track: &CaptionTrack, audio_duration_ms: u64) -> Vec<SpeechEpisode> {
    let mut starts: Vec<u64> = track.cues.iter().map(|c| c.start_ms).collect();
    starts.sort_unstable();
    starts.dedup();

    let mut episodes: Vec<SpeechEpisode> = Vec::with_capacity(MAX_EPISODES_PER_VIDEO);
    for start in starts {
        if episodes.len() == MAX_EPISODES_PER_VIDEO {
            break;
        }
        let end = start + EPISODE_LEN_MS;
        if end > audio_duration_ms {
            // later starts overrun too
            break;
        }
        if let Some(prev) = episodes.last() {
            if start < prev.end_ms + EPISODE_GAP_MS {
                continue;
            }
        }
        episodes.push(SpeechEpisode {
            video_id: track.video_id.clone(),
            index: episodes.len(),
            start_ms: start,
            end_ms: end,
        });
    }
    episodes
}
