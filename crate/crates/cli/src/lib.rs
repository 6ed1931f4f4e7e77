//! `specmel`: the spectrogram genre-classification experiment as staged
//! subcommands over files.

pub mod compare;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod synth;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use specmel_core::dsp::SpectrogramKind;

pub use config::{CompareMetric, ExperimentConfig, Pairing};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "specmel", version, about = "Linear vs. mel spectrogram genre-classification experiment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Experiment seed; every random stream derives from it
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Redo work whose outputs already exist.
    #[arg(long, global = true)]
    pub force: bool,
    #[arg(long, global = true, value_enum)]
    pub pairing: Option<Pairing>,
    /// Restrict train/evaluate/render to `linear` or `mel`
    #[arg(long, global = true, value_parser = parse_kind)]
    pub kind: Option<SpectrogramKind>,
    /// Output root.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Any config key, e.g. `--set variants=b32,b64`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode audio and write linear and mel dB tensors.
    Extract,
    /// Render one track's tensor as a PPM image.
    Render {
        #[arg(long)]
        track: String,
    },
    /// Stratified test split plus balanced one-vs-all subsets.
    Split,
    /// Train one classifier per (variant, kind, genre).
    Train,
    /// Score every classifier on the test split.
    Evaluate,
    /// Paired comparison of linear vs. mel scores.
    Compare {
        /// Metrics CSV to compare instead of the evaluate output.
        #[arg(long)]
        from_csv: Option<PathBuf>,
    },
    /// Generate a seeded synthetic corpus.
    SynthCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 160)]
        size: usize,
        #[arg(long, default_value_t = 16)]
        genres: usize,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
    },
    /// Summarize evaluation and comparison outputs.
    Report,
}

fn parse_kind(s: &str) -> Result<SpectrogramKind, String> {
    s.parse().map_err(|e: specmel_core::Error| e.to_string())
}

impl Cli {
    /// Defaults, then the config file, then command-line values.
    pub fn experiment_config(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for pair in &self.set {
            cfg.set_pair(pair)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(jobs) = self.jobs {
            cfg.jobs = jobs;
        }
        if let Some(p) = self.pairing {
            cfg.pairing = p;
        }
        if let Some(out) = &self.output {
            cfg.output = out.clone();
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = cli.experiment_config()?;
    match &cli.command {
        Command::Extract => pipeline::extract(&cfg, cli.force).map(drop),
        Command::Render { track } => {
            pipeline::render(&cfg, track, cli.kind.unwrap_or(SpectrogramKind::Mel)).map(drop)
        }
        Command::Split => pipeline::split(&cfg).map(drop),
        Command::Train => pipeline::train_models(&cfg, cli.kind, cli.force).map(drop),
        Command::Evaluate => pipeline::evaluate(&cfg, cli.kind).map(drop),
        Command::Compare { from_csv: None } => compare::compare(&cfg).map(drop),
        Command::Compare { from_csv: Some(path) } => compare::compare_csv(&cfg, path).map(drop),
        Command::SynthCorpus {
            out,
            size,
            genres,
            duration,
        } => {
            let spec = synth::SynthSpec {
                size: *size,
                genres: *genres,
                seed: cfg.seed,
                duration_secs: *duration,
            };
            synth::synth_corpus(out, &spec, cfg.jobs).map(drop)
        }
        Command::Report => report::report(&cfg).map(drop),
    }
}

/// Parse, run, and map the outcome to a process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
