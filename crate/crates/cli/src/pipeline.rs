//! File-staged experiment: each stage reads the previous stage's artifacts
//! under the output root and writes its own.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use specmel_core::audio::{decode_wav, resample_linear};
use specmel_core::dataset::{load_manifest, sha256_hex, GenreTable, ManifestLoad, SplitPlan};
use specmel_core::dsp::{
    apply_filterbank, mel_filterbank, power_to_db, read_spg, stft_power, DbReference, MelFilterbank, Spectrogram,
    SpectrogramKind, StftParams, DEFAULT_AMIN,
};
use specmel_core::metrics::{aggregate, compute_metrics, confusion, EvalReport, MetricRecord};
use specmel_core::model::{mean_bce, pool_banded, predict, train, CellId, ClassifierParams, ModelVariant, DEFAULT_THRESHOLD};
use specmel_core::render::{render_spectrogram, write_ppm};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Artifact locations under the output root.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn spectrogram(&self, track_id: &str, kind: SpectrogramKind) -> PathBuf {
        self.root.join("spectrograms").join(format!("{track_id}.{kind}.spg"))
    }

    pub fn extract_log(&self) -> PathBuf {
        self.root.join("extract.log")
    }

    pub fn split(&self) -> PathBuf {
        self.root.join("split.txt")
    }

    pub fn params(&self, variant: ModelVariant, kind: SpectrogramKind, genre: &str) -> PathBuf {
        self.root
            .join("models")
            .join(variant.to_string())
            .join(kind.as_str())
            .join(format!("{}.params", file_stem(genre)))
    }

    pub fn loss(&self, variant: ModelVariant, kind: SpectrogramKind, genre: &str) -> PathBuf {
        self.params(variant, kind, genre).with_extension("loss")
    }

    pub fn metrics_csv(&self) -> PathBuf {
        self.root.join("eval").join("metrics.csv")
    }

    pub fn macro_csv(&self) -> PathBuf {
        self.root.join("eval").join("macro.csv")
    }

    pub fn genres_csv(&self) -> PathBuf {
        self.root.join("eval").join("genres.csv")
    }

    pub fn compare_result(&self) -> PathBuf {
        self.root.join("compare").join("result.txt")
    }

    pub fn qq_csv(&self) -> PathBuf {
        self.root.join("compare").join("qq.csv")
    }

    pub fn render(&self, track_id: &str, kind: SpectrogramKind) -> PathBuf {
        self.root.join("render").join(format!("{track_id}.{kind}.ppm"))
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.txt")
    }
}

/// Genre names may contain spaces and slashes ("Old-Time / Historic").
fn file_stem(genre: &str) -> String {
    let mut out = String::with_capacity(genre.len());
    for c in genre.chars() {
        if c.is_ascii_alphanumeric() || c == '-' {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub(crate) fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| runtime_io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| runtime_io(path, e))
}

pub(crate) fn read_text(path: &Path, what: &str) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {what} at {}: {e}", path.display())))
}

fn runtime_io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

pub(crate) fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))
}

fn genre_table(cfg: &ExperimentConfig) -> CliResult<GenreTable> {
    match &cfg.genre_table {
        Some(p) if !p.exists() => Err(CliError::Validation(format!("genre table {} not found", p.display()))),
        Some(p) => Ok(GenreTable::load(p)?),
        None => Ok(GenreTable::reference()),
    }
}

pub(crate) fn manifest(cfg: &ExperimentConfig) -> CliResult<ManifestLoad> {
    let path = cfg
        .manifest
        .as_ref()
        .ok_or_else(|| CliError::Validation("no manifest configured (set `manifest`)".into()))?;
    if !path.exists() {
        return Err(CliError::Validation(format!("manifest {} not found", path.display())));
    }
    let load = load_manifest(path, &genre_table(cfg)?)?;
    for id in &load.dropped {
        eprintln!("note: track {id} has no retained genre and is left out");
    }
    Ok(load)
}

fn audio_root(cfg: &ExperimentConfig) -> PathBuf {
    cfg.audio_root.clone().unwrap_or_else(|| {
        cfg.manifest
            .as_ref()
            .and_then(|m| m.parent())
            .map(Path::to_path_buf)
            .unwrap_or_default()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractStatus {
    Extracted { linear: String, mel: String },
    Skipped { linear: String, mel: String },
    Failed(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub extracted: usize,
    pub skipped: usize,
    pub failed: usize,
}

struct Extractor<'a> {
    cfg: &'a ExperimentConfig,
    layout: &'a Layout,
    filterbank: MelFilterbank,
    force: bool,
}

impl Extractor<'_> {
    fn spectrograms(&self, path: &Path) -> specmel_core::Result<(Spectrogram, Spectrogram)> {
        let mut audio = decode_wav(path)?;
        if audio.sample_rate() != self.cfg.sample_rate {
            audio = resample_linear(&audio, self.cfg.sample_rate)?;
        }
        let params = StftParams {
            n_fft: self.cfg.n_fft,
            hop_length: self.cfg.hop_length,
            centered: true,
        };
        let power = stft_power(&audio, params)?;
        let mel = apply_filterbank(&power, &self.filterbank)?;
        let db = |s: &Spectrogram| power_to_db(s, DbReference::Max, DEFAULT_AMIN, self.cfg.top_db);
        Ok((db(&power)?, db(&mel)?))
    }

    fn track(&self, track_id: &str, audio_path: &Path) -> ExtractStatus {
        let lin_path = self.layout.spectrogram(track_id, SpectrogramKind::Linear);
        let mel_path = self.layout.spectrogram(track_id, SpectrogramKind::Mel);
        if !self.force && lin_path.exists() && mel_path.exists() {
            if let (Ok(a), Ok(b)) = (fs::read(&lin_path), fs::read(&mel_path)) {
                return ExtractStatus::Skipped {
                    linear: sha256_hex(&a),
                    mel: sha256_hex(&b),
                };
            }
        }
        let result = self.spectrograms(audio_path).and_then(|(lin, mel)| {
            let (a, b) = (lin.to_spg_bytes(), mel.to_spg_bytes());
            for (path, bytes) in [(&lin_path, &a), (&mel_path, &b)] {
                fs::write(path, bytes).map_err(|e| specmel_core::Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            Ok((sha256_hex(&a), sha256_hex(&b)))
        });
        match result {
            Ok((linear, mel)) => ExtractStatus::Extracted { linear, mel },
            Err(e) => ExtractStatus::Failed(e.to_string().replace(['\n', '\t'], " ")),
        }
    }
}

pub fn extract(cfg: &ExperimentConfig, force: bool) -> CliResult<ExtractSummary> {
    cfg.validate()?;
    let load = manifest(cfg)?;
    let layout = Layout::new(&cfg.output);
    let dir = layout.root().join("spectrograms");
    fs::create_dir_all(&dir).map_err(|e| runtime_io(&dir, e))?;
    let filterbank = mel_filterbank(
        cfg.sample_rate,
        cfg.n_fft,
        cfg.n_mels,
        cfg.fmin,
        cfg.fmax_hz(),
        cfg.mel_variant,
        cfg.mel_norm,
    )?;
    if !filterbank.degenerate_rows().is_empty() {
        eprintln!("warning: mel rows {:?} cover no FFT bin", filterbank.degenerate_rows());
    }
    let ex = Extractor {
        cfg,
        layout: &layout,
        filterbank,
        force,
    };
    let root = audio_root(cfg);
    let statuses: Vec<ExtractStatus> = pool(cfg.jobs)?.install(|| {
        load.tracks
            .par_iter()
            .map(|t| ex.track(&t.track_id, &root.join(&t.audio_path)))
            .collect()
    });

    let mut log = cfg.provenance();
    let mut summary = ExtractSummary::default();
    for (t, status) in load.tracks.iter().zip(&statuses) {
        let line = match status {
            ExtractStatus::Extracted { linear, mel } => {
                summary.extracted += 1;
                format!("{}\textracted\t{linear}\t{mel}", t.track_id)
            }
            ExtractStatus::Skipped { linear, mel } => {
                summary.skipped += 1;
                format!("{}\tskipped\t{linear}\t{mel}", t.track_id)
            }
            ExtractStatus::Failed(msg) => {
                summary.failed += 1;
                eprintln!("failed: {}: {msg}", t.track_id);
                format!("{}\tfailed\t{msg}", t.track_id)
            }
        };
        log.push_str(&line);
        log.push('\n');
    }
    write_text(&layout.extract_log(), &log)?;
    println!(
        "extract: {} extracted, {} skipped, {} failed",
        summary.extracted, summary.skipped, summary.failed
    );
    if summary.failed * 2 > load.tracks.len() {
        return Err(CliError::Runtime(format!(
            "{} of {} tracks failed to extract",
            summary.failed,
            load.tracks.len()
        )));
    }
    Ok(summary)
}

pub fn split(cfg: &ExperimentConfig) -> CliResult<SplitPlan> {
    cfg.validate()?;
    let load = manifest(cfg)?;
    if load.labels.is_empty() {
        return Err(CliError::Validation("manifest has no usable tracks".into()));
    }
    let mut plan = SplitPlan::build(&load.labels, cfg.split_fraction, cfg.seed, load.checksum.clone())?;
    plan.metadata.push(("config_hash".into(), cfg.hash()));
    let layout = Layout::new(&cfg.output);
    write_text(&layout.split(), &plan.to_text())?;

    let test: BTreeSet<usize> = plan.test.iter().copied().collect();
    let disjoint = plan.train_pool.iter().all(|i| !test.contains(i))
        && plan.subsets.iter().all(|s| s.indices.iter().all(|i| !test.contains(i)));
    println!(
        "split: {} test, {} train pool, {} subsets, test/train disjoint: {}",
        plan.test.len(),
        plan.train_pool.len(),
        plan.subsets.len(),
        if disjoint { "yes" } else { "NO" }
    );
    for w in &plan.warnings {
        eprintln!("warning: {w}");
    }
    for s in &plan.subsets {
        if let Some(w) = &s.warning {
            eprintln!("warning: {w}");
        }
    }
    if !disjoint {
        return Err(CliError::Runtime("split plan leaks test tracks into training".into()));
    }
    Ok(plan)
}

/// Manifest and split plan, checked against each other.
struct Experiment {
    load: ManifestLoad,
    plan: SplitPlan,
    layout: Layout,
}

impl Experiment {
    fn open(cfg: &ExperimentConfig) -> CliResult<Self> {
        cfg.validate()?;
        let load = manifest(cfg)?;
        let layout = Layout::new(&cfg.output);
        let plan = SplitPlan::from_text(&read_text(&layout.split(), "split plan (run `split` first)")?)?;
        if plan.manifest_checksum != load.checksum {
            return Err(CliError::Validation(
                "manifest changed since the split was made; rerun `split`".into(),
            ));
        }
        if plan.genres != load.labels.genres() || plan.n_rows != load.labels.n_rows() {
            return Err(CliError::Validation("split plan does not match the manifest".into()));
        }
        Ok(Self { load, plan, layout })
    }

    fn has_spectrogram(&self, row: usize, kind: SpectrogramKind) -> bool {
        self.layout.spectrogram(&self.load.tracks[row].track_id, kind).exists()
    }

    /// Pooled features for `rows` (others left empty).
    fn features(
        &self,
        rows: &BTreeSet<usize>,
        kind: SpectrogramKind,
        variants: &[ModelVariant],
    ) -> CliResult<Vec<Vec<Vec<f64>>>> {
        let n = self.load.tracks.len();
        let pooled: Vec<(usize, Vec<Vec<f64>>)> = rows
            .par_iter()
            .map(|&r| {
                let id = &self.load.tracks[r].track_id;
                let spec = read_spg(self.layout.spectrogram(id, kind))?;
                if spec.kind() != kind {
                    return Err(specmel_core::Error::Format(format!("{id}: tensor kind mismatch")));
                }
                let per_variant = variants
                    .iter()
                    .map(|v| pool_banded(&spec, v.bands(), id).map(|f| f.values().to_vec()))
                    .collect::<specmel_core::Result<_>>()?;
                Ok((r, per_variant))
            })
            .collect::<specmel_core::Result<_>>()?;
        let mut out = vec![vec![Vec::new(); n]; variants.len()];
        for (r, per_variant) in pooled {
            for (v, f) in per_variant.into_iter().enumerate() {
                out[v][r] = f;
            }
        }
        Ok(out)
    }

    fn column(&self, genre: usize) -> Vec<bool> {
        (0..self.load.labels.n_rows()).map(|r| self.load.labels.get(r, genre)).collect()
    }
}

fn kinds(kind: Option<SpectrogramKind>) -> Vec<SpectrogramKind> {
    kind.map_or_else(|| SpectrogramKind::ALL.to_vec(), |k| vec![k])
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainSummary {
    pub trained: usize,
    pub skipped: usize,
}

pub fn train_models(cfg: &ExperimentConfig, kind: Option<SpectrogramKind>, force: bool) -> CliResult<TrainSummary> {
    let exp = Experiment::open(cfg)?;
    let train_cfg = cfg.train_config();
    let mut summary = TrainSummary::default();
    let workers = pool(cfg.jobs)?;
    for kind in kinds(kind) {
        let subset_rows: BTreeSet<usize> = exp.plan.subsets.iter().flat_map(|s| s.indices.iter().copied()).collect();
        let missing: Vec<usize> = subset_rows.iter().copied().filter(|&r| !exp.has_spectrogram(r, kind)).collect();
        if !missing.is_empty() {
            eprintln!("warning: {} training tracks have no {kind} tensor and are left out", missing.len());
        }
        let rows: BTreeSet<usize> = subset_rows.difference(&missing.iter().copied().collect()).copied().collect();

        let mut cells = Vec::new();
        for (vi, &variant) in cfg.variants.iter().enumerate() {
            for (g, genre) in exp.plan.genres.iter().enumerate() {
                let params_path = exp.layout.params(variant, kind, genre);
                if !force && params_path.exists() {
                    summary.skipped += 1;
                    continue;
                }
                cells.push((vi, variant, g, genre.clone()));
            }
        }
        if cells.is_empty() {
            continue;
        }
        let features = workers.install(|| exp.features(&rows, kind, &cfg.variants))?;
        let results: Vec<CliResult<()>> = workers.install(|| {
            cells
                .par_iter()
                .map(|(vi, variant, g, genre)| {
                    let cell = CellId::new(genre.clone(), kind, variant.to_string());
                    let subset = exp
                        .plan
                        .subset(genre)
                        .ok_or_else(|| CliError::Validation(format!("split plan has no subset for {genre}")))?;
                    let indices: Vec<usize> = subset.indices.iter().copied().filter(|r| rows.contains(r)).collect();
                    let outcome = train(cell, &features[*vi], &exp.column(*g), &indices, &train_cfg).map_err(|e| {
                        CliError::Runtime(format!("training {variant}/{kind}/{genre} failed: {e}"))
                    })?;
                    if let Some(w) = &outcome.warning {
                        eprintln!("warning: {variant}: {w}");
                    }
                    let mut loss = cfg.provenance();
                    loss.push_str("epoch,loss\n");
                    for (e, l) in outcome.loss_history.iter().enumerate() {
                        loss.push_str(&format!("{},{l}\n", e + 1));
                    }
                    write_text(&exp.layout.loss(*variant, kind, genre), &loss)?;
                    let text = format!("{}{}", cfg.provenance(), outcome.params.to_text());
                    write_text(&exp.layout.params(*variant, kind, genre), &text)
                })
                .collect()
        });
        for r in results {
            r?;
            summary.trained += 1;
        }
    }
    println!("train: {} cells trained, {} already present", summary.trained, summary.skipped);
    Ok(summary)
}

pub fn evaluate(cfg: &ExperimentConfig, kind: Option<SpectrogramKind>) -> CliResult<EvalReport> {
    let exp = Experiment::open(cfg)?;
    let mut records: Vec<MetricRecord> = Vec::new();
    for &variant in &cfg.variants {
        for kind in kinds(kind) {
            let test: BTreeSet<usize> = exp.plan.test.iter().copied().filter(|&r| exp.has_spectrogram(r, kind)).collect();
            if test.len() < exp.plan.test.len() {
                eprintln!(
                    "warning: {} test tracks have no {kind} tensor and are left out",
                    exp.plan.test.len() - test.len()
                );
            }
            let features = pool(cfg.jobs)?.install(|| exp.features(&test, kind, &[variant]))?;
            let features = &features[0];
            for (g, genre) in exp.plan.genres.iter().enumerate() {
                let path = exp.layout.params(variant, kind, genre);
                let params = ClassifierParams::from_text(&read_text(&path, "trained parameters (run `train` first)")?)?;
                let xs: Vec<&[f64]> = test.iter().map(|&r| features[r].as_slice()).collect();
                let truth: Vec<bool> = test.iter().map(|&r| exp.load.labels.get(r, g)).collect();
                let preds = xs
                    .iter()
                    .map(|x| predict(&params, x, DEFAULT_THRESHOLD))
                    .collect::<specmel_core::Result<Vec<bool>>>()?;
                let values = compute_metrics(&confusion(&preds, &truth)?)?;
                let loss = mean_bce(&params, &xs, &truth)?;
                records.push(MetricRecord::new(genre.clone(), kind, variant.to_string(), values, loss));
            }
        }
    }
    let report = aggregate(records)?;
    let head = cfg.provenance();
    write_text(&exp.layout.metrics_csv(), &format!("{head}{}", report.records_csv()))?;
    write_text(&exp.layout.macro_csv(), &format!("{head}{}", report.macro_csv()))?;
    write_text(&exp.layout.genres_csv(), &format!("{head}{}", report.genre_csv()))?;
    for ((kind, variant), m) in &report.by_model {
        println!("evaluate: {kind} {variant}: macro F1 {:.4}, accuracy {:.4}", m.f1, m.accuracy);
    }
    Ok(report)
}

pub fn render(cfg: &ExperimentConfig, track_id: &str, kind: SpectrogramKind) -> CliResult<PathBuf> {
    let layout = Layout::new(&cfg.output);
    let src = layout.spectrogram(track_id, kind);
    if !src.exists() {
        return Err(CliError::Validation(format!(
            "no {kind} tensor for track {track_id} (run `extract` first)"
        )));
    }
    let image = render_spectrogram(&read_spg(&src)?, true)?;
    let out = layout.render(track_id, kind);
    if let Some(dir) = out.parent() {
        fs::create_dir_all(dir).map_err(|e| runtime_io(dir, e))?;
    }
    write_ppm(&image, &out)?;
    println!("render: wrote {}", out.display());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genre_file_names() {
        assert_eq!(file_stem("Old-Time / Historic"), "old-time_historic");
        assert_eq!(file_stem("Hip-Hop"), "hip-hop");
        assert_eq!(file_stem("Soul-RnB"), "soul-rnb");
    }
}
