use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::catalog::Catalog;
use crate::label::BiasLabel;

pub const DEFAULT_FOLDS: usize = 5;

/// Channel → fold index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub folds: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, channel_id: &str) -> Option<usize> {
        self.folds.get(channel_id).copied()
    }

    /// Channel ids in a fold, sorted.
    pub fn channels_in(&self, fold: usize) -> Vec<&str> {
        self.folds.iter().filter(|(_, &f)| f == fold).map(|(c, _)| c.as_str()).collect()
    }

    /// `counts[fold][class code]`.
    pub fn class_counts(&self, catalog: &Catalog) -> Vec<[usize; 3]> {
        let mut counts = vec![[0usize; 3]; self.k];
        for (channel, &fold) in &self.folds {
            if let Some(c) = catalog.channel(channel) {
                counts[fold][c.label.code()] += 1;
            }
        }
        counts
    }
}

/// Stratified k-fold split over channels.
///
/// Within each class (in code order), channel ids are sorted, shuffled with
/// a generator seeded by `seed`, and dealt round-robin; the deal continues
/// across classes so fold totals also stay within one of each other. A class
/// that is present must have at least `k` channels; absent classes are fine.
pub fn stratified_folds(catalog: &Catalog, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::TooFewFolds(k));
    }
    let mut by_class: [Vec<&str>; 3] = Default::default();
    for channel in catalog.channels() {
        by_class[channel.label.code()].push(channel.id.as_str());
    }
    for (code, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(EvalError::ClassTooSmall { label: BiasLabel::ALL[code], count: members.len(), k });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = BTreeMap::new();
    let mut next = 0;
    for members in by_class.iter_mut() {
        members.sort_unstable();
        members.shuffle(&mut rng);
        for id in members.iter() {
            folds.insert(id.to_string(), next);
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, seed, folds })
}
