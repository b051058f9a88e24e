use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::presets::{self, PresetTable};
use super::ExperimentSpec;
use crate::label::{BiasLabel, Posterior};
use crate::mlp::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPrediction {
    pub channel_id: String,
    pub fold: usize,
    pub label: BiasLabel,
    pub predicted: BiasLabel,
    pub posterior: Posterior,
    /// Number of instance posteriors pooled into this channel.
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub channels: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Cross-validation outcome. `accuracy` is micro-averaged over all channels;
/// `macro_fold_accuracy` is the unweighted mean of per-fold accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: ExperimentSpec,
    pub train_config: Option<TrainConfig>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub macro_fold_accuracy: f64,
    pub folds: Vec<FoldResult>,
    pub channels: Vec<ChannelPrediction>,
}

impl Report {
    pub fn from_predictions(
        experiment: ExperimentSpec,
        train_config: Option<TrainConfig>,
        k: usize,
        mut channels: Vec<ChannelPrediction>,
    ) -> Report {
        channels.sort_by(|a, b| a.channel_id.cmp(&b.channel_id));
        let folds: Vec<FoldResult> = (0..k)
            .map(|fold| {
                let members = channels.iter().filter(|c| c.fold == fold);
                let (n, correct) = members.fold((0, 0), |(n, ok), c| (n + 1, ok + usize::from(c.label == c.predicted)));
                FoldResult { fold, channels: n, correct, accuracy: ratio(correct, n) }
            })
            .collect();
        let correct = folds.iter().map(|f| f.correct).sum();
        let total = channels.len();
        let macro_fold_accuracy = if folds.is_empty() { 0.0 } else { folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64 };
        Report { experiment, train_config, correct, total, accuracy: ratio(correct, total), macro_fold_accuracy, folds, channels }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary of one run.
    pub fn to_text(&self) -> String {
        let e = &self.experiment;
        let mut out = String::new();
        let _ = writeln!(out, "experiment   {}", e.name);
        if e.is_baseline() {
            let _ = writeln!(out, "model        majority class");
        } else {
            let groups: Vec<&str> = e.groups.iter().map(|g| g.name()).collect();
            let _ = writeln!(out, "groups       {}", groups.join(", "));
            let _ = writeln!(out, "level        {}", e.level);
            let _ = writeln!(out, "aggregation  {}", e.aggregation);
        }
        let _ = writeln!(out, "seed         {}", e.seed);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:>4}  {:>8}  {:>7}  {:>8}", "fold", "channels", "correct", "accuracy");
        for f in &self.folds {
            let _ = writeln!(out, "{:>4}  {:>8}  {:>7}  {:>8.2}", f.fold, f.channels, f.correct, 100.0 * f.accuracy);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "accuracy (micro over channels)  {:>6.2}  ({}/{})", 100.0 * self.accuracy, self.correct, self.total);
        let _ = writeln!(out, "accuracy (macro over folds)     {:>6.2}", 100.0 * self.macro_fold_accuracy);
        out
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 { 0.0 } else { num as f64 / den as f64 }
}

/// Reports laid out like the results tables: feature experiments as
/// `# | Type | Experiment | Accuracy`, aggregation ablations as
/// `# | Level | Aggregation | Accuracy`, custom runs last.
pub fn render_table(reports: &[Report]) -> String {
    let mut results = Vec::new();
    let mut ablation = Vec::new();
    let mut custom = Vec::new();
    for r in reports {
        match presets::describe(&r.experiment.name) {
            Some(info) if info.table == PresetTable::Results => results.push((info, r)),
            Some(info) => ablation.push((info, r)),
            None => custom.push(r),
        }
    }
    results.sort_by_key(|(info, _)| info.row);
    ablation.sort_by_key(|(info, _)| info.row);

    let mut out = String::new();
    if !results.is_empty() {
        let _ = writeln!(out, "{:>3}  {:<9} {:<34} {:>8}", "#", "Type", "Experiment", "Accuracy");
        let _ = writeln!(out, "{}", "-".repeat(58));
        for (info, r) in &results {
            let _ = writeln!(out, "{:>3}  {:<9} {:<34} {:>8.2}", info.row, info.kind, info.title, 100.0 * r.accuracy);
        }
    }
    if !ablation.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "{:>3}  {:<9} {:<12} {:>8}", "#", "Level", "Aggregation", "Accuracy");
        let _ = writeln!(out, "{}", "-".repeat(36));
        for (info, r) in &ablation {
            let level = match r.experiment.level {
                super::Level::Video => "Video",
                super::Level::Episode => "Episodes",
            };
            let agg = match r.experiment.aggregation {
                super::Aggregation::Average => "Average",
                super::Aggregation::Maximum => "Maximum",
            };
            let _ = writeln!(out, "{:>3}  {:<9} {:<12} {:>8.2}", info.row, level, agg, 100.0 * r.accuracy);
        }
    }
    if !custom.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "{:<24} {:<8} {:<8} {:>8}", "Custom", "Level", "Agg", "Accuracy");
        let _ = writeln!(out, "{}", "-".repeat(51));
        for r in custom {
            let e = &r.experiment;
            let _ = writeln!(out, "{:<24} {:<8} {:<8} {:>8.2}", e.name, e.level.to_string(), e.aggregation.to_string(), 100.0 * r.accuracy);
        }
    }
    out
}
