use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{normalize_cues, CaptionCue, CaptionTrack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubtitleFormat {
    Srt,
    Webvtt,
}

impl SubtitleFormat {
    fn fraction_separator(self) -> char {
        match self {
            SubtitleFormat::Srt => ',',
            SubtitleFormat::Webvtt => '.',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            SubtitleFormat::Srt => "srt",
            SubtitleFormat::Webvtt => "vtt",
        }
    }
}

impl FromStr for SubtitleFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "srt" => Ok(SubtitleFormat::Srt),
            "webvtt" | "vtt" => Ok(SubtitleFormat::Webvtt),
            other => Err(format!("unknown subtitle format {other:?} (expected srt or webvtt)")),
        }
    }
}

impl fmt::Display for SubtitleFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubtitleFormat::Srt => "srt",
            SubtitleFormat::Webvtt => "webvtt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("line {line}: malformed timestamp {text:?}")]
    Timestamp { line: usize, text: String },
    #[error("line {line}: cue ends before it starts")]
    Inverted { line: usize },
    #[error("line {line}: cue block has no timing line")]
    MissingTiming { line: usize },
}

/// Parse an SRT or WebVTT caption file into a normalized [`CaptionTrack`].
///
/// Empty input yields an empty track. Blocks without a timing line are
/// treated as continuation text of the previous cue; before the first cue
/// they are an error (except the WebVTT header and NOTE/STYLE/REGION blocks).
pub fn parse_subtitles(video_id: &str, raw: &[u8], format: SubtitleFormat) -> Result<CaptionTrack, ParseError> {
    let text = std::str::from_utf8(raw).map_err(|_| ParseError::Encoding)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut cues: Vec<CaptionCue> = Vec::new();
    for (block_no, block) in blocks(text).into_iter().enumerate() {
        let first = block[0].1;
        if format == SubtitleFormat::Webvtt {
            if block_no == 0 && first.starts_with("WEBVTT") {
                continue;
            }
            if ["NOTE", "STYLE", "REGION"].iter().any(|kw| first == *kw || first.starts_with(&format!("{kw} "))) {
                continue;
            }
        }

        // Timing sits on the first line, or on the second after a cue id/index.
        let timing_pos = block.iter().take(2).position(|(_, l)| l.contains("-->"));
        let Some(pos) = timing_pos else {
            match cues.last_mut() {
                Some(prev) => {
                    for (_, l) in &block {
                        if !prev.text.is_empty() {
                            prev.text.push('\n');
                        }
                        prev.text.push_str(l);
                    }
                    continue;
                }
                None => return Err(ParseError::MissingTiming { line: block[0].0 }),
            }
        };

        let (line_no, timing) = block[pos];
        let (start_ms, end_ms) = parse_timing_line(timing, format)
            .ok_or_else(|| ParseError::Timestamp { line: line_no, text: timing.to_string() })?;
        if end_ms < start_ms {
            return Err(ParseError::Inverted { line: line_no });
        }
        let body: Vec<&str> = block[pos + 1..].iter().map(|(_, l)| *l).collect();
        cues.push(CaptionCue { start_ms, end_ms, text: body.join("\n") });
    }

    Ok(CaptionTrack { video_id: video_id.to_string(), cues: normalize_cues(cues) })
}

/// Groups of consecutive non-blank lines, each line tagged with its 1-based number.
fn blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn parse_timing_line(line: &str, format: SubtitleFormat) -> Option<(u64, u64)> {
    let (lhs, rhs) = line.split_once("-->")?;
    let start = parse_timestamp(lhs.trim(), format)?;
    // WebVTT cue settings (and SRT position hints) may follow the end time.
    let end_token = rhs.split_whitespace().next()?;
    let end = parse_timestamp(end_token, format)?;
    Some((start, end))
}

/// `HH:MM:SS,mmm` for SRT; `[HH:]MM:SS.mmm` for WebVTT. Hours may exceed two digits.
fn parse_timestamp(s: &str, format: SubtitleFormat) -> Option<u64> {
    let (clock, millis) = s.split_once(format.fraction_separator())?;
    if millis.len() != 3 || !millis.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let parts: Vec<&str> = clock.split(':').collect();
    let (hours, minutes, seconds) = match (format, parts.as_slice()) {
        (_, [h, m, s]) => (number(h, false)?, number(m, true)?, number(s, true)?),
        (SubtitleFormat::Webvtt, [m, s]) => (0, number(m, true)?, number(s, true)?),
        _ => return None,
    };
    if minutes >= 60 || seconds >= 60 {
        return None;
    }
    let millis: u64 = millis.parse().ok()?;
    Some(((hours * 60 + minutes) * 60 + seconds) * 1000 + millis)
}

fn number(s: &str, two_digits: bool) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (two_digits && s.len() != 2) {
        return None;
    }
    s.parse().ok()
}

fn format_timestamp(ms: u64, sep: char) -> String {
    let (h, rem) = (ms / 3_600_000, ms % 3_600_000);
    let (m, rem) = (rem / 60_000, rem % 60_000);
    let (s, frac) = (rem / 1000, rem % 1000);
    format!("{h:02}:{m:02}:{s:02}{sep}{frac:03}")
}

pub fn to_srt(track: &CaptionTrack) -> String {
    let mut out = String::new();
    for (i, cue) in track.cues.iter().enumerate() {
        let _ = writeln!(out, "{}", i + 1);
        let _ = writeln!(out, "{} --> {}", format_timestamp(cue.start_ms, ','), format_timestamp(cue.end_ms, ','));
        if !cue.text.is_empty() {
            let _ = writeln!(out, "{}", cue.text);
        }
        out.push('\n');
    }
    out
}

pub fn to_webvtt(track: &CaptionTrack) -> String {
    let mut out = String::from("WEBVTT\n\n");
    for cue in &track.cues {
        let _ = writeln!(out, "{} --> {}", format_timestamp(cue.start_ms, '.'), format_timestamp(cue.end_ms, '.'));
        if !cue.text.is_empty() {
            let _ = writeln!(out, "{}", cue.text);
        }
        out.push('\n');
    }
    out
}
