use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use ytbias::eval::{Aggregation, Level};
use ytbias::features::FeatureGroup;
use ytbias::{MissingPolicy, TrainConfig};

pub const DEFAULT_SEED: u64 = 42;

/// A user-defined experiment, alongside the named presets.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomExperiment {
    pub name: String,
    pub groups: Vec<FeatureGroup>,
    #[serde(default = "default_level")]
    pub level: Level,
    #[serde(default = "default_aggregation")]
    pub aggregation: Aggregation,
}

fn default_level() -> Level {
    Level::Video
}

fn default_aggregation() -> Aggregation {
    Aggregation::Average
}

/// Contents of the TOML run file. Relative paths are resolved against the
/// file's directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub channels: PathBuf,
    pub videos: PathBuf,
    pub episodes: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub experiments: Vec<String>,
    #[serde(default)]
    pub custom: Vec<CustomExperiment>,
    pub missing: Option<MissingPolicy>,
    #[serde(default)]
    pub parallel_folds: bool,
    pub folds: Option<usize>,

    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub dropout_rate: Option<f64>,
    pub learning_rate: Option<f64>,
    pub adagrad_epsilon: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.message()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base);
        config.check_paths()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.channels);
        join(&mut self.videos);
        for p in [&mut self.episodes, &mut self.features, &mut self.out].into_iter().flatten() {
            join(p);
        }
    }

    fn check_paths(&self) -> Result<()> {
        let inputs = [("channels", Some(&self.channels)), ("videos", Some(&self.videos)), ("episodes", self.episodes.as_ref()), ("features", self.features.as_ref())];
        for (key, path) in inputs {
            if let Some(path) = path {
                if !path.is_file() {
                    bail!("config key {key}: {} does not exist", path.display());
                }
            }
        }
        let mut names: Vec<&str> = self.custom.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            bail!("custom experiment {:?} defined twice", w[0]);
        }
        if let Some(c) = self.custom.iter().find(|c| c.name.is_empty() || !c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-')) {
            bail!("custom experiment name {:?} must be non-empty and use only letters, digits, '_' or '-'", c.name);
        }
        if let Some(c) = self.custom.iter().find(|c| c.groups.is_empty()) {
            bail!("custom experiment {:?} has no feature groups", c.name);
        }
        Ok(())
    }

    /// Training hyperparameters with the file's overrides applied.
    pub fn train_config(&self) -> Result<TrainConfig> {
        let d = TrainConfig::default();
        let config = TrainConfig {
            epochs: self.epochs.unwrap_or(d.epochs),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            dropout_rate: self.dropout_rate.unwrap_or(d.dropout_rate),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            adagrad_epsilon: self.adagrad_epsilon.unwrap_or(d.adagrad_epsilon),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, body: &str) -> PathBuf {
        for f in ["channels.jsonl", "videos.jsonl"] {
            std::fs::write(dir.join(f), "").unwrap();
        }
        let path = dir.join("run.toml");
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn relative_paths_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            dir.path(),
            r#"
channels = "channels.jsonl"
videos = "videos.jsonl"
out = "results"
seed = 7
experiments = ["baseline", "video_avg"]
learning_rate = 0.05
missing = "zero_fill"

[[custom]]
name = "words"
groups = ["nela", "bert_title_desc_tags"]
level = "episode"
"#,
        );
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.channels, dir.path().join("channels.jsonl"));
        assert_eq!(config.out.as_deref(), Some(dir.path().join("results").as_path()));
        assert_eq!(config.missing, Some(MissingPolicy::ZeroFill));
        let train = config.train_config().unwrap();
        assert_eq!((train.learning_rate, train.seed, train.epochs), (0.05, 7, 35));
        assert_eq!(config.custom[0].level, Level::Episode);
        assert_eq!(config.custom[0].aggregation, Aggregation::Average);
    }

    #[test]
    fn unknown_keys_and_missing_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "channels = \"channels.jsonl\"\nvideos = \"videos.jsonl\"\nlearnig_rate = 0.1\n");
        let err = RunConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("learnig_rate"), "{err}");

        let path = write(dir.path(), "channels = \"channels.jsonl\"\nvideos = \"nope.jsonl\"\n");
        let err = RunConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("videos") && err.contains("nope.jsonl"), "{err}");
    }
}
