//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ytbias::catalog::Catalog;
use ytbias::label::{BiasLabel, Posterior};
use ytbias::mlp::{mean_loss, Mode, Mlp};
use ytbias::segment::{CaptionCue, CaptionTrack};

pub const EPISODE_LEN: u64 = 15_000;
pub const EPISODE_GAP: u64 = 1_000;
pub const MAX_EPISODES: usize = 5;

// ---------------------------------------------------------------- gradients

/// A d-input network with Glorot weights and random (nonzero) biases, plus a
/// random batch and labels.
pub fn random_problem(d: usize, batch: usize, seed: u64) -> (Mlp, Array2<f64>, Vec<BiasLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Mlp::glorot(d, &mut rng);
    for b in [&mut net.b1, &mut net.b2, &mut net.b3] {
        b.mapv_inplace(|_| rng.gen_range(-0.5..0.5));
    }
    let x = Array2::from_shape_fn((batch, d), |_| rng.sample::<f64, _>(StandardNormal));
    let labels = (0..batch).map(|_| BiasLabel::ALL[rng.gen_range(0..3)]).collect();
    (net, x, labels)
}

fn batch_loss(net: &Mlp, x: &Array2<f64>, labels: &[BiasLabel]) -> f64 {
    mean_loss(&net.predict(x.view()).expect("valid batch"), labels)
}

/// One entry per parameter coordinate: (tensor, index, analytic, numeric).
pub struct GradientComparison {
    pub tensor: usize,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

impl GradientComparison {
    /// `|a - n| / max(|a|, |n|)`, or the absolute difference when both are
    /// below `floor`.
    pub fn relative_error(&self, floor: f64) -> f64 {
        let diff = (self.analytic - self.numeric).abs();
        let scale = self.analytic.abs().max(self.numeric.abs());
        if scale < floor { diff } else { diff / scale }
    }
}

/// Compare backprop against central differences over every parameter.
pub fn gradient_check(net: &Mlp, x: &Array2<f64>, labels: &[BiasLabel], h: f64) -> Vec<GradientComparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = net.forward_batch(x.view(), Mode::Eval, 0.0, &mut rng).expect("valid batch");
    let grads = net.backward(&cache, labels);
    let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();

    let mut probe = net.clone();
    let mut out = Vec::with_capacity(net.num_params());
    for (tensor, a) in analytic.iter().enumerate() {
        for (index, &a) in a.iter().enumerate() {
            let original = probe.slices()[tensor][index];
            probe.slices_mut()[tensor][index] = original + h;
            let plus = batch_loss(&probe, x, labels);
            probe.slices_mut()[tensor][index] = original - h;
            let minus = batch_loss(&probe, x, labels);
            probe.slices_mut()[tensor][index] = original;
            out.push(GradientComparison { tensor, index, analytic: a, numeric: (plus - minus) / (2.0 * h) });
        }
    }
    out
}

// ------------------------------------------------------------- segmentation

/// Random caption track with at most `max_cues` cues, normalized.
pub fn random_track<R: Rng>(rng: &mut R, max_cues: usize) -> (CaptionTrack, u64) {
    let n = rng.gen_range(0..=max_cues);
    let horizon = rng.gen_range(20_000..150_000u64);
    let cues = (0..n)
        .map(|i| {
            let start = rng.gen_range(0..horizon);
            let len = rng.gen_range(0..8_000u64);
            CaptionCue { start_ms: start, end_ms: start + len, text: format!("cue {i}") }
        })
        .collect();
    let duration = rng.gen_range(1..horizon + 20_000);
    (CaptionTrack::from_cues("v", cues), duration)
}

/// Enumerate every subset of distinct cue starts of size <= 5, keep the
/// feasible ones, and return the lexicographically earliest among those of
/// maximum length.
pub fn exhaustive_episodes(track: &CaptionTrack, duration: u64) -> Vec<(u64, u64)> {
    let mut starts: Vec<u64> = track.cues.iter().map(|c| c.start_ms).collect();
    starts.sort_unstable();
    starts.dedup();
    let mut best: Vec<u64> = Vec::new();
    let mut current = Vec::new();
    enumerate(&starts, 0, &mut current, &mut best, duration);
    best.into_iter().map(|s| (s, s + EPISODE_LEN)).collect()
}

fn feasible(seq: &[u64], duration: u64) -> bool {
    seq.iter().all(|&s| s + EPISODE_LEN <= duration) && seq.windows(2).all(|w| w[1] >= w[0] + EPISODE_LEN + EPISODE_GAP)
}

fn enumerate(starts: &[u64], from: usize, current: &mut Vec<u64>, best: &mut Vec<u64>, duration: u64) {
    if feasible(current, duration) && (current.len() > best.len() || (current.len() == best.len() && *current < *best)) {
        *best = current.clone();
    }
    if current.len() == MAX_EPISODES {
        return;
    }
    for i in from..starts.len() {
        current.push(starts[i]);
        enumerate(starts, i + 1, current, best, duration);
        current.pop();
    }
}

// -------------------------------------------------------------- aggregation

pub fn random_posterior<R: Rng>(rng: &mut R) -> Posterior {
    let raw: [f64; 3] = [rng.gen::<f64>() + 1e-9, rng.gen::<f64>() + 1e-9, rng.gen::<f64>() + 1e-9];
    let sum: f64 = raw.iter().sum();
    Posterior(raw.map(|v| v / sum))
}

/// Mean, then component-wise max renormalized; each with its argmax (ties low).
pub fn brute_force_aggregate(posteriors: &[Posterior]) -> ((Posterior, usize), (Posterior, usize)) {
    let n = posteriors.len() as f64;
    let mut mean = [0.0; 3];
    let mut max = [0.0; 3];
    for c in 0..3 {
        mean[c] = posteriors.iter().rev().map(|p| p.0[c]).sum::<f64>() / n;
        max[c] = posteriors.iter().map(|p| p.0[c]).fold(f64::MIN, f64::max);
    }
    let total: f64 = max.iter().sum();
    let max = max.map(|v| v / total);
    (((Posterior(mean)), first_argmax(&mean)), (Posterior(max), first_argmax(&max)))
}

pub fn first_argmax(v: &[f64; 3]) -> usize {
    let top = v.iter().cloned().fold(f64::MIN, f64::max);
    v.iter().position(|&x| x == top).expect("non-empty")
}

// ---------------------------------------------------------------- catalogs

/// Channel manifest with the given per-class sizes and shuffled, random ids.
pub fn random_catalog<R: Rng>(rng: &mut R, counts: [usize; 3]) -> Catalog {
    let labels = [["left", "extreme-left"], ["center", "center"], ["right", "extreme-right"]];
    let mut lines = Vec::new();
    for (code, &n) in counts.iter().enumerate() {
        for i in 0..n {
            let id = format!("UC{:08x}{code}{i}", rng.gen::<u32>());
            let raw = labels[code][rng.gen_range(0..2)];
            lines.push(format!(r#"{{"id":"{id}","name":"{id}","youtube_url":"https://youtube.com/channel/{id}","label_raw":"{raw}"}}"#));
        }
    }
    Catalog::from_readers(lines.join("\n").as_bytes(), &b""[..]).expect("generated manifest loads")
}
