//! WebAssembly bindings for the browser demo in `www/`.

use specmel_core::audio::synth_tone;
use specmel_core::dsp::{
    apply_filterbank, mel_filterbank, power_to_db, stft_power, DbReference, MelVariant, Normalization, SpectrogramKind,
    StftParams, DEFAULT_AMIN, DEFAULT_TOP_DB,
};
use specmel_core::render::render_spectrogram;
use specmel_core::stats::{paired_comparison, PairedSample};
use wasm_bindgen::prelude::*;

fn js(e: specmel_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Image {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl Image {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major RGBA bytes, ready for `ImageData`.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

/// Viridis image of a pure tone's linear or mel dB spectrogram, low
/// frequencies at the bottom.
#[wasm_bindgen]
pub fn tone_spectrogram(
    freq_hz: f64,
    duration_secs: f64,
    sample_rate: u32,
    kind: &str,
    n_fft: usize,
    hop_length: usize,
    n_mels: usize,
) -> Result<Image, JsError> {
    let kind: SpectrogramKind = kind.parse().map_err(js)?;
    let tone = synth_tone(freq_hz, duration_secs, sample_rate, 0.8).map_err(js)?;
    let power = stft_power(&tone, StftParams { n_fft, hop_length, centered: true }).map_err(js)?;
    let power = match kind {
        SpectrogramKind::Linear => power,
        SpectrogramKind::Mel => {
            let fb = mel_filterbank(
                sample_rate,
                n_fft,
                n_mels,
                0.0,
                sample_rate as f64 / 2.0,
                MelVariant::Slaney,
                Normalization::SlaneyArea,
            )
            .map_err(js)?;
            apply_filterbank(&power, &fb).map_err(js)?
        }
    };
    let db = power_to_db(&power, DbReference::Max, DEFAULT_AMIN, Some(DEFAULT_TOP_DB)).map_err(js)?;
    let image = render_spectrogram(&db, true).map_err(js)?;
    Ok(Image {
        width: image.width(),
        height: image.height(),
        rgba: image.to_rgba(),
    })
}

/// Row-major `n_mels × (n_fft/2 + 1)` filterbank weights.
#[wasm_bindgen]
pub fn filterbank_weights(
    sample_rate: u32,
    n_fft: usize,
    n_mels: usize,
    variant: &str,
    normalization: &str,
) -> Result<Vec<f64>, JsError> {
    let fb = mel_filterbank(
        sample_rate,
        n_fft,
        n_mels,
        0.0,
        sample_rate as f64 / 2.0,
        variant.parse().map_err(js)?,
        normalization.parse().map_err(js)?,
    )
    .map_err(js)?;
    Ok(fb.weights().to_vec())
}

#[wasm_bindgen]
pub struct PairedReport {
    n: usize,
    mean_diff: f64,
    t: f64,
    df: usize,
    p: f64,
    shapiro_w: f64,
    shapiro_p: f64,
    qq_theoretical: Vec<f64>,
    qq_observed: Vec<f64>,
}

#[wasm_bindgen]
impl PairedReport {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[wasm_bindgen(getter)]
    pub fn mean_diff(&self) -> f64 {
        self.mean_diff
    }

    #[wasm_bindgen(getter)]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[wasm_bindgen(getter)]
    pub fn df(&self) -> usize {
        self.df
    }

    #[wasm_bindgen(getter)]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[wasm_bindgen(getter)]
    pub fn shapiro_w(&self) -> f64 {
        self.shapiro_w
    }

    #[wasm_bindgen(getter)]
    pub fn shapiro_p(&self) -> f64 {
        self.shapiro_p
    }

    pub fn qq_theoretical(&self) -> Vec<f64> {
        self.qq_theoretical.clone()
    }

    pub fn qq_observed(&self) -> Vec<f64> {
        self.qq_observed.clone()
    }
}

/// Shapiro–Wilk and paired t-test on `a − b`.
#[wasm_bindgen]
pub fn paired_test(a: Vec<f64>, b: Vec<f64>) -> Result<PairedReport, JsError> {
    let labels = (0..a.len()).map(|i| i.to_string()).collect();
    let sample = PairedSample::new(labels, a, b).map_err(js)?;
    let r = paired_comparison(&sample).map_err(js)?;
    Ok(PairedReport {
        n: r.n,
        mean_diff: r.mean_diff,
        t: r.t_statistic,
        df: r.degrees_of_freedom,
        p: r.p_value,
        shapiro_w: r.shapiro_w,
        shapiro_p: r.shapiro_p,
        qq_theoretical: r.qq.iter().map(|q| q.theoretical).collect(),
        qq_observed: r.qq.iter().map(|q| q.observed).collect(),
    })
}
