//! Flat `key = value` experiment configuration.
//!
//! Precedence is command line over config file over built-in defaults. The
//! config hash covers every setting that can change a result, and leaves out
//! paths and worker count, so the same experiment run from two directories
//! produces identical artifacts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use specmel_core::audio::CANONICAL_SAMPLE_RATE;
use specmel_core::dataset::sha256_hex;
use specmel_core::dsp::{MelVariant, Normalization, DEFAULT_HOP, DEFAULT_N_FFT, DEFAULT_N_MELS, DEFAULT_TOP_DB};
use specmel_core::model::{ModelVariant, TrainConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Pairing {
    /// One pair per trained model variant (macro score over genres).
    Model,
    /// One pair per (variant, genre) cell.
    Cell,
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::Model => "model",
            Pairing::Cell => "cell",
        })
    }
}

impl FromStr for Pairing {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "model" => Ok(Pairing::Model),
            "cell" => Ok(Pairing::Cell),
            other => Err(CliError::Validation(format!("pairing must be `model` or `cell`, got `{other}`"))),
        }
    }
}

/// Score compared between the two spectrogram kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMetric {
    Accuracy,
    BalancedAccuracy,
    Precision,
    Recall,
    F1,
    Loss,
}

impl CompareMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            CompareMetric::Accuracy => "accuracy",
            CompareMetric::BalancedAccuracy => "balanced_accuracy",
            CompareMetric::Precision => "precision",
            CompareMetric::Recall => "recall",
            CompareMetric::F1 => "f1",
            CompareMetric::Loss => "loss",
        }
    }
}

impl FromStr for CompareMetric {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "accuracy" => CompareMetric::Accuracy,
            "balanced_accuracy" => CompareMetric::BalancedAccuracy,
            "precision" => CompareMetric::Precision,
            "recall" => CompareMetric::Recall,
            "f1" => CompareMetric::F1,
            "loss" => CompareMetric::Loss,
            other => return Err(CliError::Validation(format!("unknown compare metric `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifest: Option<PathBuf>,
    /// Reference table when unset.
    pub genre_table: Option<PathBuf>,
    /// Defaults to the manifest's directory.
    pub audio_root: Option<PathBuf>,
    pub output: PathBuf,
    pub seed: u64,
    pub sample_rate: u32,
    pub n_fft: usize,
    pub hop_length: usize,
    pub n_mels: usize,
    pub mel_variant: MelVariant,
    pub mel_norm: Normalization,
    pub fmin: f64,
    /// Nyquist when unset.
    pub fmax: Option<f64>,
    pub top_db: Option<f64>,
    pub split_fraction: f64,
    pub variants: Vec<ModelVariant>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub pairing: Pairing,
    pub compare_metric: CompareMetric,
    /// Worker threads; 0 picks the machine default.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            manifest: None,
            genre_table: None,
            audio_root: None,
            output: PathBuf::from("specmel-out"),
            seed: 0,
            sample_rate: CANONICAL_SAMPLE_RATE,
            n_fft: DEFAULT_N_FFT,
            hop_length: DEFAULT_HOP,
            n_mels: DEFAULT_N_MELS,
            mel_variant: MelVariant::Slaney,
            mel_norm: Normalization::SlaneyArea,
            fmin: 0.0,
            fmax: None,
            top_db: Some(DEFAULT_TOP_DB),
            split_fraction: 0.1,
            variants: ModelVariant::DEFAULTS.to_vec(),
            learning_rate: train.learning_rate,
            epochs: train.epochs,
            batch_size: train.batch_size,
            l2: train.l2,
            pairing: Pairing::Cell,
            compare_metric: CompareMetric::F1,
            jobs: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("invalid value for `{key}`: `{value}`")))
}

fn optional_f64(key: &str, value: &str) -> CliResult<Option<f64>> {
    match value.trim() {
        "" | "none" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn fmt_optional(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl ExperimentConfig {
    /// Apply one setting. Relative paths are joined onto `base` when given.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> CliResult<()> {
        let path = |v: &str| {
            let p = PathBuf::from(v.trim());
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        match key.trim() {
            "manifest" => self.manifest = Some(path(value)),
            "genre_table" => self.genre_table = Some(path(value)),
            "audio_root" => self.audio_root = Some(path(value)),
            "output" => self.output = path(value),
            "seed" => self.seed = parse(key, value)?,
            "sample_rate" => self.sample_rate = parse(key, value)?,
            "n_fft" => self.n_fft = parse(key, value)?,
            "hop_length" => self.hop_length = parse(key, value)?,
            "n_mels" => self.n_mels = parse(key, value)?,
            "mel_variant" => self.mel_variant = value.trim().parse()?,
            "mel_norm" => self.mel_norm = value.trim().parse()?,
            "fmin" => self.fmin = parse(key, value)?,
            "fmax" => self.fmax = optional_f64(key, value)?,
            "top_db" => self.top_db = optional_f64(key, value)?,
            "split_fraction" => self.split_fraction = parse(key, value)?,
            "variants" => {
                self.variants = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "l2" => self.l2 = parse(key, value)?,
            "pairing" => self.pairing = value.parse()?,
            "compare_metric" => self.compare_metric = value.parse()?,
            "jobs" => self.jobs = parse(key, value)?,
            other => return Err(CliError::Validation(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// `KEY=VALUE` from the command line.
    pub fn set_pair(&mut self, pair: &str) -> CliResult<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("expected KEY=VALUE, got `{pair}`")))?;
        self.set(k, v, None)
    }

    pub fn apply_text(&mut self, text: &str, base: Option<&Path>) -> CliResult<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected `key = value`", n + 1)))?;
            self.set(k, v, base)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.apply_text(&text, Some(&base))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            l2: self.l2,
            seed: self.seed,
        }
    }

    pub fn fmax_hz(&self) -> f64 {
        self.fmax.unwrap_or(self.sample_rate as f64 / 2.0)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.sample_rate == 0 {
            return bad("sample_rate must be positive".into());
        }
        if !self.n_fft.is_power_of_two() || self.n_fft < 2 {
            return bad(format!("n_fft must be a power of two, got {}", self.n_fft));
        }
        if self.hop_length == 0 || self.hop_length > self.n_fft {
            return bad(format!("hop_length must be in 1..={}, got {}", self.n_fft, self.hop_length));
        }
        if self.n_mels == 0 {
            return bad("n_mels must be positive".into());
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return bad(format!("split_fraction must be in (0, 1), got {}", self.split_fraction));
        }
        if self.variants.is_empty() {
            return bad("at least one model variant is required".into());
        }
        if let Some(v) = self.variants.iter().find(|v| v.bands() > self.n_mels) {
            return bad(format!("variant {v} has more bands than the {} mel rows", self.n_mels));
        }
        if let Some(t) = self.top_db {
            if !(t >= 0.0) {
                return bad(format!("top_db must be nonnegative, got {t}"));
            }
        }
        self.train_config().validate()?;
        Ok(())
    }

    /// Every result-affecting setting in a fixed order.
    pub fn canonical_text(&self) -> String {
        let variants: Vec<String> = self.variants.iter().map(ToString::to_string).collect();
        [
            ("seed", self.seed.to_string()),
            ("sample_rate", self.sample_rate.to_string()),
            ("n_fft", self.n_fft.to_string()),
            ("hop_length", self.hop_length.to_string()),
            ("n_mels", self.n_mels.to_string()),
            ("mel_variant", self.mel_variant.as_str().to_string()),
            ("mel_norm", self.mel_norm.as_str().to_string()),
            ("fmin", self.fmin.to_string()),
            ("fmax", fmt_optional(self.fmax)),
            ("top_db", fmt_optional(self.top_db)),
            ("split_fraction", self.split_fraction.to_string()),
            ("variants", variants.join(",")),
            ("learning_rate", self.learning_rate.to_string()),
            ("epochs", self.epochs.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("l2", self.l2.to_string()),
            ("pairing", self.pairing.to_string()),
            ("compare_metric", self.compare_metric.as_str().to_string()),
        ]
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_text().as_bytes())[..16].to_string()
    }

    /// Comment lines stamped at the top of every text artifact.
    pub fn provenance(&self) -> String {
        format!("# config_hash = {}\n# seed = {}\n", self.hash(), self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# comment\nseed = 7\nvariants = b32, b64\nmanifest = m.csv\n", Some(Path::new("/data")))
            .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.variants.len(), 2);
        assert_eq!(c.manifest.as_deref(), Some(Path::new("/data/m.csv")));
        c.set_pair("seed=9").unwrap();
        assert_eq!(c.seed, 9);
        assert!(c.set_pair("colour=blue").is_err());
        assert!(c.apply_text("seed 3", None).is_err());
    }

    #[test]
    fn hash_ignores_paths_and_jobs() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output = PathBuf::from("/elsewhere");
        b.jobs = 3;
        b.manifest = Some(PathBuf::from("x.csv"));
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.n_fft = 1000;
        assert!(c.validate().is_err());
        c = ExperimentConfig::default();
        c.split_fraction = 1.0;
        assert!(c.validate().is_err());
        c = ExperimentConfig::default();
        c.set_pair("variants=b256").unwrap();
        assert!(c.validate().is_err());
    }
}
