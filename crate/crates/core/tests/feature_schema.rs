//! `features.jsonl` as written by an external extractor: the contract the
//! store enforces on ingest.

use serde_json::json;
use ytbias::features::{FeatureError, FeatureGroup, FeatureStore, Scope};
use ytbias::Catalog;

const CHANNELS: &str = r#"{"id":"c1","name":"One","youtube_url":"u1","label_raw":"left"}
{"id":"c2","name":"Two","youtube_url":"u2","label_raw":"extreme-right","stats":{"views":10,"video_count":2,"subscribers":3}}"#;

const VIDEOS: &str = r#"{"id":"v1","channel_id":"c1","title":"a","description":"b","tags":["x"],"views":10,"likes":2,"dislikes":1,"comments":0,"duration_s":300}
{"duration_s":120,"comments":4,"dislikes":0,"likes":5,"views":99,"tags":[],"description":"","title":"c","channel_id":"c2","id":"v2"}
{"id":"v3","channel_id":"c2","title":"d","description":"e","tags":["y","z"],"views":0,"likes":0,"dislikes":0,"comments":0,"duration_s":45}"#;

fn catalog() -> Catalog {
    Catalog::from_readers(CHANNELS.as_bytes(), VIDEOS.as_bytes()).unwrap()
}

fn line(group: FeatureGroup, video: &str, episode: Option<usize>, vector: Vec<f64>) -> String {
    let mut v = json!({ "group": group.name(), "video_id": video, "vector": vector });
    if let Some(e) = episode {
        v["episode_index"] = json!(e);
    }
    v.to_string()
}

/// Every group for every video; `episodes[i]` episode-scope records for video i.
fn fixture(catalog: &Catalog, episodes: [usize; 3]) -> String {
    let mut out = Vec::new();
    for (video, &n) in catalog.videos().zip(&episodes) {
        for group in FeatureGroup::ALL {
            match group.scope() {
                Scope::Video if group == FeatureGroup::NumericMeta => out.push(line(group, &video.id, None, video.metadata.as_vector().to_vec())),
                Scope::Video => out.push(line(group, &video.id, None, (0..group.dim()).map(|d| d as f64 * 0.001).collect())),
                Scope::Episode => {
                    for e in 0..n {
                        out.push(line(group, &video.id, Some(e), vec![e as f64 - 0.5; group.dim()]));
                    }
                }
            }
        }
    }
    out.join("\n")
}

#[test]
fn three_video_fixture_ingests_cleanly() {
    let catalog = catalog();
    let episodes = [5, 2, 0];
    let (store, stats) = FeatureStore::ingest(fixture(&catalog, episodes).as_bytes(), &catalog).unwrap();
    // videos × video-scope groups + episodes × episode-scope groups
    assert_eq!(stats.records, 3 * 4 + 7 * 2);
    assert_eq!(store.len(), stats.records);
    assert_eq!(stats.skipped, 0);
    assert_eq!(store.video_vector(FeatureGroup::NumericMeta, "v1").unwrap(), &[10.0, 2.0, 1.0, 0.0, 300.0]);
    assert_eq!(store.video_vector(FeatureGroup::NumericMeta, "v2").unwrap(), &[99.0, 5.0, 0.0, 4.0, 120.0]);
    for group in FeatureGroup::ALL {
        let v = match group.scope() {
            Scope::Video => store.video_vector(group, "v3").unwrap().len(),
            Scope::Episode => store.episode_vector(group, "v1", 4).unwrap().len(),
        };
        assert_eq!(v, group.dim());
    }
    let dims: Vec<usize> = FeatureGroup::ALL.iter().map(|g| g.dim()).collect();
    assert_eq!(dims, vec![768, 768, 260, 5, 600, 385]);
    assert_eq!(store.episode_indices(FeatureGroup::Ivectors, "v2"), vec![0, 1]);
}

#[test]
fn contract_violations_are_rejected() {
    let catalog = catalog();
    let ingest = |text: String| FeatureStore::ingest(text.as_bytes(), &catalog).map(|_| ());

    let short = line(FeatureGroup::Ivectors, "v1", Some(0), vec![0.0; 599]);
    match ingest(short) {
        Err(e @ FeatureError::Dimension { expected: 600, actual: 599, .. }) => assert!(e.to_string().contains("ivectors"), "{e}"),
        other => panic!("{other:?}"),
    }

    let unknown = line(FeatureGroup::Nela, "v9", None, vec![0.0; 260]);
    assert!(matches!(ingest(unknown), Err(FeatureError::UnknownVideo { .. })));

    let scoped = line(FeatureGroup::Nela, "v1", Some(0), vec![0.0; 260]);
    assert!(matches!(ingest(scoped), Err(FeatureError::EpisodeIndex { .. })));

    let unscoped = line(FeatureGroup::OpensmileIs09, "v1", None, vec![0.0; 385]);
    assert!(matches!(ingest(unscoped), Err(FeatureError::EpisodeIndex { .. })));

    let meta = line(FeatureGroup::NumericMeta, "v1", None, vec![1.0; 5]);
    assert!(matches!(ingest(format!("{meta}\n{meta}")), Err(FeatureError::Duplicate { .. })));

    let overflow = r#"{"group":"numeric_meta","video_id":"v1","vector":[1e999,0,0,0,0]}"#.to_string();
    assert!(ingest(overflow).is_err());

    assert!(matches!(ingest("{not json".into()), Err(FeatureError::Json { line: 1, .. })));
    assert!(ingest(String::new()).is_ok());
}
