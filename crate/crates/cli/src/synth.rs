//! Seeded synthetic corpus: each genre has a spectral signature (tone, chirp
//! or noise band) at its own mel-spaced center frequency, and the per-genre
//! track counts follow the reference imbalance.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use specmel_core::audio::{write_wav_pcm16, AudioBuffer, CANONICAL_SAMPLE_RATE};
use specmel_core::dataset::reference::deal_labels;
use specmel_core::dataset::{manifest_csv, GenreTable, REFERENCE_GENRES, REFERENCE_TRACK_COUNT};
use specmel_core::dsp::{hz_to_mel, mel_to_hz, MelVariant};
use specmel_core::rng::{seeded, sub_seed, ExperimentRng};

use crate::error::{CliError, CliResult};
use crate::pipeline::{pool, write_text};

const MIN_COUNT: usize = 3;
const LOWEST_CENTER_HZ: f64 = 150.0;
const HIGHEST_CENTER_HZ: f64 = 6000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub size: usize,
    pub genres: usize,
    pub seed: u64,
    pub duration_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub counts: Vec<(String, usize)>,
    pub tracks: usize,
}

/// `k` reference genres evenly spaced in popularity rank, most popular first.
pub fn genre_selection(k: usize) -> CliResult<Vec<(&'static str, usize)>> {
    let total = REFERENCE_GENRES.len();
    if !(2..=total).contains(&k) {
        return Err(CliError::Validation(format!("genre count must be in 2..={total}, got {k}")));
    }
    Ok((0..k)
        .map(|i| REFERENCE_GENRES[(i * (total - 1) + (k - 1) / 2) / (k - 1)])
        .collect())
}

/// Per-genre track counts for a corpus of `size` tracks.
///
/// Counts are proportional to the reference counts. The divisor is the
/// reference track count scaled to the selected genres, kept large enough
/// that no genre covers more than 80% of the tracks and small enough that
/// every track receives a label.
pub fn genre_track_counts(k: usize, size: usize) -> CliResult<Vec<(String, usize)>> {
    let selection = genre_selection(k)?;
    let all: usize = REFERENCE_GENRES.iter().map(|(_, c)| c).sum();
    let sub: usize = selection.iter().map(|(_, c)| c).sum();
    let largest = selection.iter().map(|(_, c)| *c).max().unwrap_or(0) as f64;
    let scaled = REFERENCE_TRACK_COUNT as f64 * sub as f64 / all as f64;
    let divisor = scaled.max(largest / 0.8).min(sub as f64);
    let counts: Vec<(String, usize)> = selection
        .iter()
        .map(|(g, c)| {
            let n = (size as f64 * *c as f64 / divisor).round() as usize;
            (g.to_string(), n.max(MIN_COUNT))
        })
        .collect();
    let sum: usize = counts.iter().map(|(_, c)| c).sum();
    let max = counts.iter().map(|(_, c)| *c).max().unwrap_or(0);
    if max > size || sum > 2 * size || sum < size {
        return Err(CliError::Validation(format!(
            "cannot lay out {k} genres over {size} tracks with one or two genres each"
        )));
    }
    Ok(counts)
}

fn center_frequencies(k: usize) -> Vec<f64> {
    let lo = hz_to_mel(LOWEST_CENTER_HZ, MelVariant::Htk).expect("positive");
    let hi = hz_to_mel(HIGHEST_CENTER_HZ, MelVariant::Htk).expect("positive");
    (0..k)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (k - 1) as f64, MelVariant::Htk).expect("positive"))
        .collect()
}

fn core_tag(genre: &str) -> String {
    genre.to_lowercase()
}

fn alias_tag(genre: &str) -> String {
    format!("{} revival", genre.to_lowercase())
}

fn cross_tag(a: &str, b: &str) -> String {
    format!("{} x {}", a.to_lowercase(), b.to_lowercase())
}

fn genre_table(genres: &[String]) -> CliResult<GenreTable> {
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for g in genres {
        entries.push((core_tag(g), vec![g.clone()]));
        entries.push((alias_tag(g), vec![g.clone()]));
    }
    for (i, a) in genres.iter().enumerate() {
        for b in &genres[i + 1..] {
            entries.push((cross_tag(a, b), vec![a.clone(), b.clone()]));
        }
    }
    Ok(GenreTable::new(entries)?)
}

fn tags(genres: &[String], row: &[usize], rng: &mut ExperimentRng) -> Vec<String> {
    let mut out = match row {
        [a, b] if rng.random_bool(0.5) => {
            let (a, b) = (a.min(b), a.max(b));
            vec![cross_tag(&genres[*a], &genres[*b])]
        }
        _ => row.iter().map(|&g| core_tag(&genres[g])).collect(),
    };
    if rng.random_bool(0.3) {
        out.push(alias_tag(&genres[row[0]]));
    }
    out
}

fn add_signature(buf: &mut [f64], sr: f64, kind: usize, center: f64, rng: &mut ExperimentRng) {
    let amp = rng.random_range(0.25..0.4);
    let duration = buf.len() as f64 / sr;
    match kind % 3 {
        0 => {
            let f = center * rng.random_range(0.98..1.02);
            let (p1, p2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            for (i, s) in buf.iter_mut().enumerate() {
                let t = i as f64 / sr;
                *s += amp * ((2.0 * PI * f * t + p1).sin() + 0.4 * (4.0 * PI * f * t + p2).sin());
            }
        }
        1 => {
            let (mut f0, mut f1) = (center / 1.2, center * 1.2);
            if rng.random_bool(0.5) {
                std::mem::swap(&mut f0, &mut f1);
            }
            let p = rng.random_range(0.0..2.0 * PI);
            for (i, s) in buf.iter_mut().enumerate() {
                let t = i as f64 / sr;
                *s += amp * (2.0 * PI * (f0 * t + (f1 - f0) * t * t / (2.0 * duration)) + p).sin();
            }
        }
        _ => {
            let partials: Vec<(f64, f64)> = (0..16)
                .map(|_| (center * rng.random_range(1.0 / 1.12..1.12), rng.random_range(0.0..2.0 * PI)))
                .collect();
            for (i, s) in buf.iter_mut().enumerate() {
                let t = i as f64 / sr;
                *s += amp / 4.0 * partials.iter().map(|(f, p)| (2.0 * PI * f * t + p).sin()).sum::<f64>();
            }
        }
    }
}

fn render_track(row: &[usize], centers: &[f64], samples: usize, rng: &mut ExperimentRng) -> Vec<f32> {
    let sr = CANONICAL_SAMPLE_RATE as f64;
    let mut buf = vec![0.0; samples];
    for &g in row {
        add_signature(&mut buf, sr, g, centers[g], rng);
    }
    // a tone that belongs to no genre
    let distractor = loop {
        let f = (rng.random_range(80f64.ln()..9000f64.ln())).exp();
        if centers.iter().all(|c| (f / c).ln().abs() > 1.3f64.ln()) {
            break f;
        }
    };
    let (amp, phase) = (rng.random_range(0.02..0.1), rng.random_range(0.0..2.0 * PI));
    let noise = rng.random_range(0.005..0.03);
    for (i, s) in buf.iter_mut().enumerate() {
        *s += amp * (2.0 * PI * distractor * i as f64 / sr + phase).sin() + noise * rng.random_range(-1.0..1.0);
    }
    let peak = buf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gain = if peak > 0.95 { 0.95 / peak } else { 1.0 };
    buf.iter().map(|v| (v * gain) as f32).collect()
}

/// Writes `audio/*.wav`, `manifest.csv`, `genres.csv` and `experiment.conf`.
pub fn synth_corpus(out: &Path, spec: &SynthSpec, jobs: usize) -> CliResult<CorpusSummary> {
    if !(spec.duration_secs > 0.0 && spec.duration_secs <= 60.0) {
        return Err(CliError::Validation(format!("duration must be in (0, 60] s, got {}", spec.duration_secs)));
    }
    let counts = genre_track_counts(spec.genres, spec.size)?;
    let genres: Vec<String> = counts.iter().map(|(g, _)| g.clone()).collect();
    let centers = center_frequencies(genres.len());
    let table = genre_table(&genres)?;

    let dealt = deal_labels(&counts.iter().map(|(_, c)| *c).collect::<Vec<_>>(), spec.size);
    let mut order: Vec<usize> = (0..spec.size).collect();
    order.shuffle(&mut seeded(sub_seed(spec.seed, "synth/layout")));
    let mut rows = vec![Vec::new(); spec.size];
    for (slot, &track) in order.iter().enumerate() {
        rows[track] = dealt[slot].clone();
    }

    let audio_dir = out.join("audio");
    fs::create_dir_all(&audio_dir).map_err(|e| CliError::Runtime(format!("{}: {e}", audio_dir.display())))?;
    let samples = (spec.duration_secs * CANONICAL_SAMPLE_RATE as f64).round() as usize;
    let tracks: Vec<(String, std::path::PathBuf, Vec<String>)> = pool(jobs)?.install(|| {
        rows.par_iter()
            .enumerate()
            .map(|(i, row)| {
                let id = format!("syn{i:05}");
                let mut rng = seeded(sub_seed(spec.seed, &format!("synth/{id}")));
                let track_tags = tags(&genres, row, &mut rng);
                let audio = AudioBuffer::new(render_track(row, &centers, samples, &mut rng), CANONICAL_SAMPLE_RATE, &id)?;
                let rel = Path::new("audio").join(format!("{id}.wav"));
                write_wav_pcm16(&audio, out.join(&rel))?;
                Ok((id, rel, track_tags))
            })
            .collect::<specmel_core::Result<_>>()
    })?;

    write_text(
        &out.join("manifest.csv"),
        &manifest_csv(tracks.iter().map(|(id, p, t)| (id.as_str(), p.as_path(), t.as_slice()))),
    )?;
    write_text(&out.join("genres.csv"), &table.to_csv_string())?;
    write_text(
        &out.join("experiment.conf"),
        &format!(
            "# synthetic corpus: {} tracks, {} genres\nmanifest = manifest.csv\ngenre_table = genres.csv\naudio_root = .\noutput = results\nseed = {}\n",
            spec.size,
            genres.len(),
            spec.seed
        ),
    )?;
    println!(
        "synth-corpus: {} tracks; {}",
        spec.size,
        counts.iter().map(|(g, c)| format!("{g} {c}")).collect::<Vec<_>>().join(", ")
    );
    Ok(CorpusSummary {
        counts,
        tracks: spec.size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_spans_the_ranks() {
        let four: Vec<&str> = genre_selection(4).unwrap().iter().map(|(g, _)| *g).collect();
        assert_eq!(four.first(), Some(&"Hip-Hop"));
        assert_eq!(four.last(), Some(&"Jazz"));
        assert_eq!(genre_selection(16).unwrap().len(), 16);
        assert!(genre_selection(1).is_err());
    }

    #[test]
    fn full_table_at_160_tracks() {
        let counts = genre_track_counts(16, 160).unwrap();
        assert_eq!(counts[0], ("Hip-Hop".to_string(), 50));
        assert_eq!(counts[15], ("Jazz".to_string(), 3));
    }

    #[test]
    fn four_genres_keep_the_imbalance() {
        let counts = genre_track_counts(4, 320).unwrap();
        let (hi, lo) = (counts[0].1 as f64, counts[3].1 as f64);
        assert!((15.0..=25.0).contains(&(hi / lo)), "{counts:?}");
        let sum: usize = counts.iter().map(|(_, c)| c).sum();
        assert!((320..=640).contains(&sum));
    }

    #[test]
    fn centers_are_increasing() {
        let c = center_frequencies(4);
        assert!((c[0] - LOWEST_CENTER_HZ).abs() < 1e-6 && (c[3] - HIGHEST_CENTER_HZ).abs() < 1e-6);
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }
}
