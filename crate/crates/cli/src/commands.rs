use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::Array2;
use ytbias::eval::{distant_label_instances, presets, render_table, run_experiment, stratified_folds, ExperimentSpec, Report, RunOptions};
use ytbias::features::{FeatureLayout, InstanceKey, Scope};
use ytbias::mlp::{train_with_history, Checkpoint};
use ytbias::{Catalog, FeatureGroup, FeatureStore, MissingPolicy, SubtitleFormat};

use crate::config::{RunConfig, DEFAULT_SEED};
use crate::segment;

/// Command-line values that override the run file.
#[derive(Debug, Default)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub missing: Option<MissingPolicy>,
    pub parallel_folds: bool,
}

struct Session {
    config: RunConfig,
    seed: u64,
    out: PathBuf,
    options: RunOptions,
}

impl Session {
    fn open(flags: &Flags) -> Result<Session> {
        let Some(path) = &flags.config else {
            bail!("this command needs --config <run file>");
        };
        let config = RunConfig::load(path)?;
        let out = flags
            .out
            .clone()
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).join("results"));
        let options = RunOptions {
            missing: flags.missing.or(config.missing).unwrap_or_default(),
            parallel_folds: flags.parallel_folds || config.parallel_folds,
            folds: config.folds.unwrap_or(0),
        };
        let seed = flags.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
        Ok(Session { config, seed, out, options })
    }

    fn catalog(&self) -> Result<Catalog> {
        let mut catalog = Catalog::load(&self.config.channels, &self.config.videos)?;
        if let Some(episodes) = &self.config.episodes {
            catalog.attach_episode_file(episodes)?;
        }
        Ok(catalog)
    }

    fn store(&self, catalog: &Catalog) -> Result<FeatureStore> {
        let Some(path) = &self.config.features else {
            bail!("run file has no features path");
        };
        let (store, stats) = FeatureStore::ingest_file(path, catalog)?;
        log::info!("loaded {} feature records ({} for skipped videos)", stats.records, stats.skipped);
        Ok(store)
    }

    fn spec(&self, name: &str) -> Result<ExperimentSpec> {
        if let Some(c) = self.config.custom.iter().find(|c| c.name == name) {
            return Ok(ExperimentSpec::new(&c.name, c.groups.iter().copied(), c.level, c.aggregation, self.seed));
        }
        presets::preset(name, self.seed).map_err(|e| {
            if self.config.custom.is_empty() {
                e.into()
            } else {
                let custom: Vec<&str> = self.config.custom.iter().map(|c| c.name.as_str()).collect();
                anyhow::anyhow!("{e}; custom: {}", custom.join(", "))
            }
        })
    }

    fn create_out(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("cannot create output directory {}", self.out.display()))
    }
}

pub fn segment(flags: &Flags, subtitles: &Path, durations: &Path, format: SubtitleFormat) -> Result<()> {
    let out = flags.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let output = out.join("episodes.jsonl");
    let summary = segment::run(subtitles, durations, format, &output)?;
    println!("videos processed  {}", summary.videos);
    println!("episodes emitted  {}", summary.episodes);
    println!("mean per video    {:.2}", summary.mean_per_video());
    if summary.failed > 0 {
        println!("files skipped     {}", summary.failed);
    }
    println!("wrote {}", output.display());
    Ok(())
}

pub fn ingest(flags: &Flags) -> Result<()> {
    let session = Session::open(flags)?;
    let catalog = session.catalog()?;
    let s = catalog.summary();
    println!("channels           {:>7}  (left {}, center {}, right {})", s.channels, s.left, s.center, s.right);
    println!("excluded channels  {:>7}", s.excluded_channels);
    println!("videos             {:>7}  ({:.2} per channel)", s.videos, s.mean_videos_per_channel());
    println!("skipped videos     {:>7}", s.skipped_videos);
    println!("episodes           {:>7}  ({:.2} per video)", s.episodes, s.mean_episodes_per_video());
    if session.config.features.is_some() {
        let store = session.store(&catalog)?;
        println!("feature records    {:>7}", store.len());
        for group in FeatureGroup::ALL {
            let count: usize = catalog
                .videos()
                .map(|v| match group.scope() {
                    Scope::Video => usize::from(store.video_vector(group, &v.id).is_some()),
                    Scope::Episode => store.episode_indices(group, &v.id).len(),
                })
                .sum();
            println!("  {:<22} {:>7}  ({} x {})", group.name(), count, group.scope(), group.dim());
        }
    }
    Ok(())
}

pub fn folds(flags: &Flags, k: usize) -> Result<()> {
    let session = Session::open(flags)?;
    let catalog = session.catalog()?;
    let folds = stratified_folds(&catalog, k, session.seed)?;
    session.create_out()?;
    let path = session.out.join("folds.json");
    std::fs::write(&path, serde_json::to_string_pretty(&folds)? + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    println!("{:>4}  {:>5}  {:>6}  {:>5}  {:>5}", "fold", "left", "center", "right", "total");
    for (fold, c) in folds.class_counts(&catalog).iter().enumerate() {
        println!("{fold:>4}  {:>5}  {:>6}  {:>5}  {:>5}", c[0], c[1], c[2], c.iter().sum::<usize>());
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn train(flags: &Flags, name: &str) -> Result<()> {
    let session = Session::open(flags)?;
    let spec = session.spec(name)?;
    if spec.is_baseline() {
        bail!("experiment {name} has no feature groups to train on");
    }
    let catalog = session.catalog()?;
    let store = session.store(&catalog)?;
    let instances = distant_label_instances(&catalog, spec.level);
    if instances.is_empty() {
        bail!("no {}-level instances in the catalog", spec.level);
    }

    let layout = FeatureLayout::new(spec.groups.iter().copied());
    let keys: Vec<InstanceKey> = instances.iter().map(|i| i.key.clone()).collect();
    let missing = session.options.missing;
    let normalizer = store.fit_normalizer(&layout, &keys, missing)?;
    let mut x = Array2::zeros((keys.len(), layout.dim()));
    for (mut row, key) in x.rows_mut().into_iter().zip(&keys) {
        row.assign(&ndarray::Array1::from(store.assemble(key, &layout, &normalizer, missing)?));
    }
    let labels: Vec<_> = instances.iter().map(|i| i.label).collect();

    let mut config = session.config.train_config()?;
    config.seed = session.seed;
    let (model, losses) = train_with_history(x.view(), &labels, &config)?;

    let mut checkpoint = Checkpoint::new(&model, config);
    checkpoint.layout = Some(layout);
    checkpoint.normalizer = Some(normalizer);
    session.create_out()?;
    let path = session.out.join(format!("model_{}.json", spec.name));
    checkpoint.save(&path)?;
    println!(
        "trained {} on {} {}-level instances ({} inputs), final epoch loss {:.4}",
        spec.name,
        keys.len(),
        spec.level,
        x.ncols(),
        losses.last().copied().unwrap_or(f64::NAN)
    );
    println!("wrote {}", path.display());
    Ok(())
}

pub fn evaluate(flags: &Flags, names: &[String]) -> Result<()> {
    let session = Session::open(flags)?;
    let names: Vec<String> = if names.is_empty() { session.config.experiments.clone() } else { names.to_vec() };
    if names.is_empty() {
        bail!("no experiments named on the command line or in the run file");
    }
    let specs = names.iter().map(|n| session.spec(n)).collect::<Result<Vec<_>>>()?;
    let catalog = session.catalog()?;
    let store = if specs.iter().all(ExperimentSpec::is_baseline) { FeatureStore::new() } else { session.store(&catalog)? };
    let train = session.config.train_config()?;

    session.create_out()?;
    let mut reports = Vec::with_capacity(specs.len());
    for spec in &specs {
        log::info!("running {}", spec.name);
        let report = run_experiment(spec, &catalog, &store, &train, session.options).with_context(|| format!("experiment {}", spec.name))?;
        let json = session.out.join(format!("report_{}.json", spec.name));
        let text = session.out.join(format!("report_{}.txt", spec.name));
        std::fs::write(&json, report.to_json()).with_context(|| format!("cannot write {}", json.display()))?;
        std::fs::write(&text, report.to_text()).with_context(|| format!("cannot write {}", text.display()))?;
        reports.push(report);
    }
    print!("{}", render_table(&reports));
    Ok(())
}

pub fn report(flags: &Flags) -> Result<()> {
    let out = match (&flags.out, &flags.config) {
        (Some(out), _) => out.clone(),
        (None, Some(_)) => Session::open(flags)?.out,
        (None, None) => PathBuf::from("results"),
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(&out).with_context(|| format!("cannot read {}", out.display()))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.starts_with("report_") && name.ends_with(".json") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        bail!("no report_*.json files in {}", out.display());
    }
    paths.sort();
    let mut reports = Vec::with_capacity(paths.len());
    for path in &paths {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let report: Report = serde_json::from_str(&text).with_context(|| format!("{} is not a report", path.display()))?;
        reports.push(report);
    }
    print!("{}", render_table(&reports));
    Ok(())
}
