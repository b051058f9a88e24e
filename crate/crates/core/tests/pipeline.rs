mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ytbias::eval::{distant_label_instances, run_experiment, stratified_folds, Aggregation, ExperimentSpec, Level, RunOptions};
use ytbias::features::{FeatureGroup, MissingPolicy};
use ytbias::synthetic::{SyntheticConfig, SyntheticDataset};
use ytbias::{BiasLabel, TrainConfig};

use common::random_catalog;

fn opensmile_spec(level: Level, aggregation: Aggregation, seed: u64) -> ExperimentSpec {
    ExperimentSpec::new("synthetic", [FeatureGroup::OpensmileIs09], level, aggregation, seed)
}

#[test]
fn separable_synthetic_data_is_classified() {
    let data = SyntheticDataset::generate(&SyntheticConfig::default());
    let (catalog, store) = data.load().unwrap();
    assert_eq!(catalog.num_channels(), 60);
    for level in [Level::Video, Level::Episode] {
        let report = run_experiment(&opensmile_spec(level, Aggregation::Average, 1), &catalog, &store, &TrainConfig::default(), RunOptions::default()).unwrap();
        assert!(report.accuracy >= 0.95, "{level}: {}", report.accuracy);
        assert_eq!(report.total, 60);
    }
}

#[test]
fn report_accuracy_matches_recount() {
    let config = SyntheticConfig { separation: 0.3, seed: 5, ..Default::default() };
    let (catalog, store) = SyntheticDataset::generate(&config).load().unwrap();
    let report = run_experiment(&opensmile_spec(Level::Video, Aggregation::Maximum, 3), &catalog, &store, &TrainConfig::default(), RunOptions::default()).unwrap();
    let correct = report.channels.iter().filter(|c| c.label == c.predicted).count();
    assert_eq!(report.correct, correct);
    assert_eq!(report.total, report.channels.len());
    assert_eq!(report.accuracy, correct as f64 / report.total as f64);
    for c in &report.channels {
        assert_eq!(catalog.channel(&c.channel_id).unwrap().label, c.label);
        assert_eq!(c.instances, catalog.videos_of(&c.channel_id).len());
        assert_eq!(c.predicted, c.posterior.predicted());
    }
    let per_fold: usize = report.folds.iter().map(|f| f.correct).sum();
    assert_eq!(per_fold, correct);
}

#[test]
fn no_channel_on_both_sides_of_a_fold() {
    let (catalog, _) = SyntheticDataset::generate(&SyntheticConfig { channels_per_class: [9, 14, 11], ..Default::default() }).load().unwrap();
    let folds = stratified_folds(&catalog, 5, 11).unwrap();
    for level in [Level::Video, Level::Episode] {
        let instances = distant_label_instances(&catalog, level);
        for fold in 0..5 {
            let test: BTreeSet<&str> = instances.iter().filter(|i| folds.fold_of(&i.channel_id) == Some(fold)).map(|i| i.channel_id.as_str()).collect();
            let train: BTreeSet<&str> = instances.iter().filter(|i| folds.fold_of(&i.channel_id) != Some(fold)).map(|i| i.channel_id.as_str()).collect();
            assert!(test.is_disjoint(&train));
            assert_eq!(test.len() + train.len(), catalog.num_channels());
        }
    }
}

#[test]
fn reports_are_reproducible_and_parallel_safe() {
    let config = SyntheticConfig { separation: 1.0, noise_groups: vec![FeatureGroup::NumericMeta], ..Default::default() };
    let (catalog, store) = SyntheticDataset::generate(&config).load().unwrap();
    let spec = ExperimentSpec::new("det", [FeatureGroup::OpensmileIs09, FeatureGroup::NumericMeta], Level::Episode, Aggregation::Average, 8);
    let train = TrainConfig::default();
    let a = run_experiment(&spec, &catalog, &store, &train, RunOptions::default()).unwrap().to_json();
    let b = run_experiment(&spec, &catalog, &store, &train, RunOptions::default()).unwrap().to_json();
    let c = run_experiment(&spec, &catalog, &store, &train, RunOptions { parallel_folds: true, ..Default::default() }).unwrap().to_json();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn average_and_maximum_agree_on_single_instance_channels() {
    let config = SyntheticConfig { videos_per_channel: 1, separation: 0.5, ..Default::default() };
    let (catalog, store) = SyntheticDataset::generate(&config).load().unwrap();
    let train = TrainConfig::default();
    let avg = run_experiment(&opensmile_spec(Level::Video, Aggregation::Average, 4), &catalog, &store, &train, RunOptions::default()).unwrap();
    let max = run_experiment(&opensmile_spec(Level::Video, Aggregation::Maximum, 4), &catalog, &store, &train, RunOptions::default()).unwrap();
    assert_eq!(avg.accuracy, max.accuracy);
    for (a, m) in avg.channels.iter().zip(&max.channels) {
        assert_eq!(a.posterior, m.posterior);
        assert_eq!(a.predicted, m.predicted);
    }
}

#[test]
fn majority_baseline_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let empty = ytbias::FeatureStore::new();
    let run = |counts: [usize; 3], rng: &mut ChaCha8Rng| {
        let catalog = random_catalog(rng, counts);
        run_experiment(&ExperimentSpec::baseline(2019), &catalog, &empty, &TrainConfig::default(), RunOptions::default()).unwrap()
    };

    let balanced = run([10, 10, 10], &mut rng);
    assert!((balanced.accuracy - 1.0 / 3.0).abs() < 1e-12);
    assert!(balanced.channels.iter().all(|c| c.predicted == BiasLabel::Left));

    assert_eq!(run([0, 7, 0], &mut rng).accuracy, 1.0);

    let shaped = run([101, 177, 143], &mut rng);
    assert_eq!((shaped.correct, shaped.total), (177, 421));
    assert_eq!(format!("{:.2}", 100.0 * shaped.accuracy), "42.04");
}

#[test]
fn zero_fill_tolerates_missing_groups_that_error_mode_rejects() {
    let data = SyntheticDataset::generate(&SyntheticConfig { noise_groups: vec![FeatureGroup::Nela], ..Default::default() });
    // drop the nela record of every third video
    let mut dropped = 0;
    let features: String = data
        .features
        .lines()
        .filter(|l| {
            let skip = l.contains(r#""group":"nela""#) && { dropped += 1; dropped % 3 == 0 };
            !skip
        })
        .map(|l| format!("{l}\n"))
        .collect();
    let data = SyntheticDataset { features, ..data };
    let (catalog, store) = data.load().unwrap();
    let spec = ExperimentSpec::new("gaps", [FeatureGroup::OpensmileIs09, FeatureGroup::Nela], Level::Video, Aggregation::Average, 0);
    let train = TrainConfig::default();
    assert!(run_experiment(&spec, &catalog, &store, &train, RunOptions::default()).is_err());
    let report = run_experiment(&spec, &catalog, &store, &train, RunOptions { missing: MissingPolicy::ZeroFill, ..Default::default() }).unwrap();
    assert!(report.accuracy >= 0.85, "{}", report.accuracy);
}
