//! Named experiments: eleven feature combinations and the four
//! classification-level × aggregation variants, numbered in report tables.

use super::{Aggregation, EvalError, ExperimentSpec, Level};
use crate::features::FeatureGroup::{self, *};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetTable {
    Results,
    Ablation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub table: PresetTable,
    pub row: usize,
    /// "Text", "Meta", "Audio", "Combined", or empty for the baseline.
    pub kind: &'static str,
    pub title: &'static str,
    pub groups: &'static [FeatureGroup],
    pub level: Level,
    pub aggregation: Aggregation,
}

const TEXT_META: &[FeatureGroup] = &[BertTitleDescTags, BertCaptions, Nela, NumericMeta];
const TEXT_META_OPENSMILE: &[FeatureGroup] = &[BertTitleDescTags, BertCaptions, Nela, NumericMeta, OpensmileIs09];

const fn results(row: usize, name: &'static str, kind: &'static str, title: &'static str, groups: &'static [FeatureGroup]) -> PresetInfo {
    PresetInfo { name, table: PresetTable::Results, row, kind, title, groups, level: Level::Video, aggregation: Aggregation::Average }
}

const fn ablation(row: usize, name: &'static str, level: Level, aggregation: Aggregation) -> PresetInfo {
    PresetInfo { name, table: PresetTable::Ablation, row, kind: "", title: "Text + Meta + openSMILE", groups: TEXT_META_OPENSMILE, level, aggregation }
}

pub const PRESETS: &[PresetInfo] = &[
    results(1, "baseline", "", "Baseline", &[]),
    results(2, "nela", "Text", "NELA (title, description)", &[Nela]),
    results(3, "meta", "Meta", "Numerical", &[NumericMeta]),
    results(4, "ivectors", "Audio", "i-vectors", &[Ivectors]),
    results(5, "opensmile", "Audio", "openSMILE", &[OpensmileIs09]),
    results(6, "bert_captions", "Text", "BERT (captions)", &[BertCaptions]),
    results(7, "bert_text", "Text", "BERT (title, description, tags)", &[BertTitleDescTags]),
    results(8, "text_meta", "Combined", "Text + Meta", TEXT_META),
    results(9, "text_meta_ivec", "Combined", "Text + Meta + i-vectors", &[BertTitleDescTags, BertCaptions, Nela, NumericMeta, Ivectors]),
    results(10, "text_meta_audio", "Combined", "Text + Meta + Audio", &[BertTitleDescTags, BertCaptions, Nela, NumericMeta, Ivectors, OpensmileIs09]),
    results(11, "text_meta_opensmile", "Combined", "Text + Meta + openSMILE", TEXT_META_OPENSMILE),
    ablation(1, "video_avg", Level::Video, Aggregation::Average),
    ablation(2, "video_max", Level::Video, Aggregation::Maximum),
    ablation(3, "episode_avg", Level::Episode, Aggregation::Average),
    ablation(4, "episode_max", Level::Episode, Aggregation::Maximum),
];

pub const ABLATION_PRESETS: [&str; 4] = ["video_avg", "video_max", "episode_avg", "episode_max"];

pub fn describe(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

pub fn preset(name: &str, seed: u64) -> Result<ExperimentSpec, EvalError> {
    let info = describe(name).ok_or_else(|| EvalError::UnknownPreset {
        name: name.to_string(),
        valid: names().collect::<Vec<_>>().join(", "),
    })?;
    Ok(ExperimentSpec::new(info.name, info.groups.iter().copied(), info.level, info.aggregation, seed))
}
