use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use ytbias::{MissingPolicy, SubtitleFormat};

mod commands;
mod config;
mod segment;

#[derive(Debug, Parser)]
#[command(name = "ytbias", version, about = "Political-bias prediction for YouTube news channels")]
struct Cli {
    /// TOML run file (manifest paths, experiments, hyperparameters).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for fold assignment and training; overrides the run file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the run file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// What to do when an instance lacks a feature group.
    #[arg(long, global = true, value_enum)]
    missing: Option<MissingArg>,
    /// Run cross-validation folds on separate threads.
    #[arg(long, global = true)]
    parallel_folds: bool,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MissingArg {
    Error,
    #[value(name = "zero_fill")]
    ZeroFill,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Srt,
    Webvtt,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract speech episodes from caption files.
    Segment {
        /// Directory of `<video_id>.srt` or `<video_id>.vtt` files.
        #[arg(long)]
        subtitles: PathBuf,
        /// JSON lines with `video_id` and `duration_ms` (or a videos manifest).
        #[arg(long)]
        durations: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
    },
    /// Load and validate the manifest and feature file, print counts.
    Ingest,
    /// Write the stratified channel folds.
    Folds {
        #[arg(long, default_value_t = ytbias::eval::DEFAULT_FOLDS)]
        k: usize,
    },
    /// Train one model on all channels and save it.
    Train {
        /// Preset or custom experiment name.
        experiment: String,
    },
    /// Cross-validate experiments and write reports.
    #[command(visible_alias = "run")]
    Evaluate {
        /// Preset or custom names; defaults to the run file's list.
        experiments: Vec<String>,
    },
    /// Run the level × aggregation ablation.
    Ablate,
    /// Print the table of all reports in the output directory.
    Report,
}

impl From<MissingArg> for MissingPolicy {
    fn from(m: MissingArg) -> Self {
        match m {
            MissingArg::Error => MissingPolicy::Error,
            MissingArg::ZeroFill => MissingPolicy::ZeroFill,
        }
    }
}

impl From<FormatArg> for SubtitleFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Srt => SubtitleFormat::Srt,
            FormatArg::Webvtt => SubtitleFormat::Webvtt,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let flags = commands::Flags {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        missing: cli.missing.map(Into::into),
        parallel_folds: cli.parallel_folds,
    };
    match cli.command {
        Command::Segment { subtitles, durations, format } => commands::segment(&flags, &subtitles, &durations, format.into()),
        Command::Ingest => commands::ingest(&flags),
        Command::Folds { k } => commands::folds(&flags, k),
        Command::Train { experiment } => commands::train(&flags, &experiment),
        Command::Evaluate { experiments } => commands::evaluate(&flags, &experiments),
        Command::Ablate => {
            let names: Vec<String> = ytbias::eval::presets::ABLATION_PRESETS.iter().map(|s| s.to_string()).collect();
            commands::evaluate(&flags, &names)
        }
        Command::Report => commands::report(&flags),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
