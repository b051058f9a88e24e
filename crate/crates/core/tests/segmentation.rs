mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ytbias::segment::{extract_episodes, parse_subtitles, to_srt, to_webvtt, CaptionCue, CaptionTrack, SubtitleFormat};

use common::{exhaustive_episodes, random_track, EPISODE_GAP, EPISODE_LEN, MAX_EPISODES};

#[test]
fn greedy_equals_exhaustive_on_random_tracks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let (track, duration) = random_track(&mut rng, 20);
        let got: Vec<(u64, u64)> = extract_episodes(&track, duration).iter().map(|e| (e.start_ms, e.end_ms)).collect();
        assert_eq!(got, exhaustive_episodes(&track, duration), "case {case}: {track:?} duration {duration}");
    }
}

#[test]
fn dense_track_hits_the_cap() {
    let cues = (0..200).map(|i| CaptionCue { start_ms: i * 2_000, end_ms: i * 2_000 + 1_500, text: "x".into() }).collect();
    let track = CaptionTrack::from_cues("v", cues);
    let eps = extract_episodes(&track, 400_000);
    assert_eq!(eps.len(), MAX_EPISODES);
    // next usable start after [0,15000] is the first cue start >= 16000
    let starts: Vec<u64> = eps.iter().map(|e| e.start_ms).collect();
    assert_eq!(starts, vec![0, 16_000, 32_000, 48_000, 64_000]);
}

#[test]
fn srt_and_webvtt_agree() {
    let srt = "1\n00:00:01,000 --> 00:00:03,000\nhello\n\n2\n00:01:02,500 --> 00:01:20,000\nworld\n";
    let vtt = "WEBVTT\n\nNOTE a comment\n\n00:01.000 --> 00:03.000\nhello\n\n01:02.500 --> 01:20.000 align:start\nworld\n";
    let a = parse_subtitles("v", srt.as_bytes(), SubtitleFormat::Srt).unwrap();
    let b = parse_subtitles("v", vtt.as_bytes(), SubtitleFormat::Webvtt).unwrap();
    assert_eq!(a, b);
    assert_eq!(extract_episodes(&a, 120_000).len(), 2);
}

proptest! {
    #[test]
    fn episodes_respect_timing_rules(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (track, duration) = random_track(&mut rng, 40);
        let eps = extract_episodes(&track, duration);
        prop_assert!(eps.len() <= MAX_EPISODES);
        for (i, e) in eps.iter().enumerate() {
            prop_assert_eq!(e.index, i);
            prop_assert_eq!(e.end_ms - e.start_ms, EPISODE_LEN);
            prop_assert!(e.end_ms <= duration);
            prop_assert!(track.cues.iter().any(|c| c.start_ms == e.start_ms));
        }
        for w in eps.windows(2) {
            prop_assert!(w[1].start_ms >= w[0].end_ms + EPISODE_GAP);
        }
    }

    #[test]
    fn serialization_round_trips_both_formats(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (track, _) = random_track(&mut rng, 20);
        let srt = parse_subtitles("v", to_srt(&track).as_bytes(), SubtitleFormat::Srt).unwrap();
        let vtt = parse_subtitles("v", to_webvtt(&track).as_bytes(), SubtitleFormat::Webvtt).unwrap();
        prop_assert_eq!(&srt, &track);
        prop_assert_eq!(&vtt, &track);
    }
}
