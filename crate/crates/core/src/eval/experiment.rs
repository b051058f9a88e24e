use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;

use super::report::{ChannelPrediction, Report};
use super::{aggregate_posteriors, stratified_folds, EvalError, ExperimentSpec, FoldAssignment, Level, DEFAULT_FOLDS};
use crate::catalog::Catalog;
use crate::features::{FeatureLayout, FeatureStore, InstanceKey, MissingPolicy};
use crate::label::{argmax, BiasLabel, Posterior};
use crate::mlp::{train, TrainConfig};

/// A video or episode carrying its channel's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInstance {
    pub key: InstanceKey,
    pub channel_id: String,
    pub label: BiasLabel,
}

/// Distant supervision: every video (or every episode, at episode level)
/// gets the label of the channel it belongs to. Ordered by channel, video,
/// episode.
pub fn distant_label_instances(catalog: &Catalog, level: Level) -> Vec<LabeledInstance> {
    let mut out = Vec::new();
    for channel in catalog.channels() {
        for video_id in catalog.videos_of(&channel.id) {
            match level {
                Level::Video => out.push(LabeledInstance {
                    key: InstanceKey::Video(video_id.clone()),
                    channel_id: channel.id.clone(),
                    label: channel.label,
                }),
                Level::Episode => {
                    for ep in catalog.episodes_of(video_id) {
                        out.push(LabeledInstance {
                            key: InstanceKey::Episode(video_id.clone(), ep.index),
                            channel_id: channel.id.clone(),
                            label: channel.label,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub missing: MissingPolicy,
    /// Run folds on separate threads. Results are identical either way.
    pub parallel_folds: bool,
    /// Number of folds; 0 means [`DEFAULT_FOLDS`].
    pub folds: usize,
}

impl RunOptions {
    fn k(&self) -> usize {
        if self.folds == 0 { DEFAULT_FOLDS } else { self.folds }
    }
}

/// Predict the most frequent training-fold class for every test channel.
pub fn majority_baseline(catalog: &Catalog, folds: &FoldAssignment, spec: &ExperimentSpec) -> Result<Report, EvalError> {
    if catalog.num_channels() == 0 {
        return Err(EvalError::EmptyCatalog);
    }
    let mut predictions = Vec::new();
    for fold in 0..folds.k {
        let mut counts = [0.0f64; 3];
        for channel in catalog.channels() {
            if folds.fold_of(&channel.id) != Some(fold) {
                counts[channel.label.code()] += 1.0;
            }
        }
        let majority = BiasLabel::ALL[argmax(&counts)];
        for id in folds.channels_in(fold) {
            let channel = catalog.channel(id).expect("fold channels come from the catalog");
            predictions.push(ChannelPrediction {
                channel_id: id.to_string(),
                fold,
                label: channel.label,
                predicted: majority,
                posterior: Posterior::one_hot(majority),
                instances: catalog.videos_of(id).len(),
            });
        }
    }
    Ok(Report::from_predictions(spec.clone(), None, folds.k, predictions))
}

/// Cross-validate one experiment over stratified channel folds.
///
/// Per fold: fit the normalizer on training instances, train the network on
/// them (seed = `spec.seed + fold`), predict test instances and pool them per
/// channel. The baseline spec (no feature groups) delegates to
/// [`majority_baseline`].
pub fn run_experiment(
    spec: &ExperimentSpec,
    catalog: &Catalog,
    store: &FeatureStore,
    config: &TrainConfig,
    options: RunOptions,
) -> Result<Report, EvalError> {
    if catalog.num_channels() == 0 {
        return Err(EvalError::EmptyCatalog);
    }
    let folds = stratified_folds(catalog, options.k(), spec.seed)?;
    if spec.is_baseline() {
        return majority_baseline(catalog, &folds, spec);
    }

    let instances = distant_label_instances(catalog, spec.level);
    let with_instances: BTreeSet<&str> = instances.iter().map(|i| i.channel_id.as_str()).collect();
    if let Some(channel) = catalog.channels().find(|c| !with_instances.contains(c.id.as_str())) {
        return Err(EvalError::NoInstances { channel: channel.id.clone(), level: spec.level });
    }
    let layout = FeatureLayout::new(spec.groups.iter().copied());

    let run_fold = |fold: usize| run_fold(fold, spec, &folds, &instances, &layout, store, config, options.missing);
    let per_fold: Vec<Result<Vec<ChannelPrediction>, EvalError>> = if options.parallel_folds {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..folds.k).map(|f| scope.spawn(move || run_fold(f))).collect();
            handles.into_iter().map(|h| h.join().expect("fold thread panicked")).collect()
        })
    } else {
        (0..folds.k).map(run_fold).collect()
    };

    let mut predictions = Vec::with_capacity(catalog.num_channels());
    for fold in per_fold {
        predictions.extend(fold?);
    }
    let mut used = *config;
    used.seed = spec.seed;
    Ok(Report::from_predictions(spec.clone(), Some(used), folds.k, predictions))
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    fold: usize,
    spec: &ExperimentSpec,
    folds: &FoldAssignment,
    instances: &[LabeledInstance],
    layout: &FeatureLayout,
    store: &FeatureStore,
    config: &TrainConfig,
    missing: MissingPolicy,
) -> Result<Vec<ChannelPrediction>, EvalError> {
    let (test, training): (Vec<&LabeledInstance>, Vec<&LabeledInstance>) =
        instances.iter().partition(|i| folds.fold_of(&i.channel_id) == Some(fold));
    if training.is_empty() {
        return Err(EvalError::EmptyTraining { fold });
    }

    let train_keys: Vec<InstanceKey> = training.iter().map(|i| i.key.clone()).collect();
    let normalizer = store.fit_normalizer(layout, &train_keys, missing)?;
    let matrix = |rows: &[&LabeledInstance]| -> Result<Array2<f64>, EvalError> {
        let mut m = Array2::zeros((rows.len(), layout.dim()));
        for (mut row, inst) in m.rows_mut().into_iter().zip(rows) {
            let x = store.assemble(&inst.key, layout, &normalizer, missing)?;
            row.assign(&ndarray::ArrayView1::from(&x));
        }
        Ok(m)
    };

    let x_train = matrix(&training)?;
    let y_train: Vec<BiasLabel> = training.iter().map(|i| i.label).collect();
    let fold_config = TrainConfig { seed: spec.seed.wrapping_add(fold as u64), ..*config };
    let model = train(x_train.view(), &y_train, &fold_config)?;

    let x_test = matrix(&test)?;
    let posteriors = model.predict(x_test.view())?;

    let mut by_channel: BTreeMap<&str, (BiasLabel, Vec<Posterior>)> = BTreeMap::new();
    for (inst, p) in test.iter().zip(posteriors) {
        by_channel.entry(inst.channel_id.as_str()).or_insert_with(|| (inst.label, Vec::new())).1.push(p);
    }
    let mut out = Vec::with_capacity(by_channel.len());
    for (channel_id, (label, posteriors)) in by_channel {
        let (posterior, predicted) = aggregate_posteriors(&posteriors, spec.aggregation)?;
        out.push(ChannelPrediction {
            channel_id: channel_id.to_string(),
            fold,
            label,
            predicted,
            posterior,
            instances: posteriors.len(),
        });
    }
    Ok(out)
}
