use crate::error::{Error, Result};

use super::spectrogram::{Scale, Spectrogram, SpectrogramKind};

/// Mel-scale convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MelVariant {
    /// `2595 log10(1 + f/700)`
    Htk,
    /// Linear below 1 kHz (`3f/200`), logarithmic above with step `ln(6.4)/27`.
    Slaney,
}

impl MelVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            MelVariant::Htk => "htk",
            MelVariant::Slaney => "slaney",
        }
    }
}

impl std::str::FromStr for MelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "htk" => Ok(MelVariant::Htk),
            "slaney" => Ok(MelVariant::Slaney),
            other => Err(Error::Parse(format!("unknown mel variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Rows scaled to a unit maximum.
    None,
    /// Rows scaled by `2 / (upper edge - lower edge)` in Hz.
    SlaneyArea,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::SlaneyArea => "slaney",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Normalization::None),
            "slaney" | "slaney-area" => Ok(Normalization::SlaneyArea),
            other => Err(Error::Parse(format!("unknown filter normalization {other:?}"))),
        }
    }
}

const SLANEY_MIN_LOG_HZ: f64 = 1000.0;
// 3 * 1000 / 200, written out so the branch point is exact
const SLANEY_MIN_LOG_MEL: f64 = 15.0;

fn slaney_logstep() -> f64 {
    6.4f64.ln() / 27.0
}

pub fn hz_to_mel(f: f64, variant: MelVariant) -> Result<f64> {
    if !(f >= 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!("frequency {f} Hz must be finite and non-negative")));
    }
    Ok(match variant {
        MelVariant::Htk => 2595.0 * (1.0 + f / 700.0).log10(),
        MelVariant::Slaney if f < SLANEY_MIN_LOG_HZ => 3.0 * f / 200.0,
        MelVariant::Slaney => SLANEY_MIN_LOG_MEL + (f / SLANEY_MIN_LOG_HZ).ln() / slaney_logstep(),
    })
}

pub fn mel_to_hz(m: f64, variant: MelVariant) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mel value {m} must be finite and non-negative")));
    }
    Ok(match variant {
        MelVariant::Htk => 700.0 * (10f64.powf(m / 2595.0) - 1.0),
        MelVariant::Slaney if m < SLANEY_MIN_LOG_MEL => 200.0 * m / 3.0,
        MelVariant::Slaney => SLANEY_MIN_LOG_HZ * (slaney_logstep() * (m - SLANEY_MIN_LOG_MEL)).exp(),
    })
}

/// Triangular filters mapping `n_fft/2 + 1` FFT bins onto mel bands.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    n_mels: usize,
    n_bins: usize,
    weights: Vec<f64>,
    breakpoints: Vec<f64>,
    fmin: f64,
    fmax: f64,
    variant: MelVariant,
    normalization: Normalization,
    degenerate_rows: Vec<usize>,
}

impl MelFilterbank {
    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Row-major `n_mels × n_bins` weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n_bins..(i + 1) * self.n_bins]
    }

    /// The `n_mels + 2` band edges in Hz, equally spaced on the mel axis.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn fmin(&self) -> f64 {
        self.fmin
    }

    pub fn fmax(&self) -> f64 {
        self.fmax
    }

    pub fn variant(&self) -> MelVariant {
        self.variant
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Rows whose triangle falls between FFT bins and is therefore all zero.
    pub fn degenerate_rows(&self) -> &[usize] {
        &self.degenerate_rows
    }
}

/// Build a mel filterbank. Filter `i` rises linearly from breakpoint `i` to
/// `i+1` and falls to zero at `i+2`, sampled at bin frequencies
/// `k · sr / n_fft`.
pub fn mel_filterbank(
    sample_rate: u32,
    n_fft: usize,
    n_mels: usize,
    fmin: f64,
    fmax: f64,
    variant: MelVariant,
    normalization: Normalization,
) -> Result<MelFilterbank> {
    let nyquist = f64::from(sample_rate) / 2.0;
    if sample_rate == 0 || n_fft < 2 {
        return Err(Error::Domain("sample rate and n_fft must be positive".into()));
    }
    if n_mels == 0 {
        return Err(Error::Domain("n_mels must be at least 1".into()));
    }
    if !(fmin >= 0.0 && fmin < fmax) {
        return Err(Error::Domain(format!("need 0 <= fmin < fmax, got {fmin}..{fmax}")));
    }
    if fmax > nyquist {
        return Err(Error::Domain(format!("fmax {fmax} Hz exceeds Nyquist {nyquist} Hz")));
    }

    let n_bins = n_fft / 2 + 1;
    let mel_lo = hz_to_mel(fmin, variant)?;
    let mel_hi = hz_to_mel(fmax, variant)?;
    let step = (mel_hi - mel_lo) / (n_mels + 1) as f64;
    let mut breakpoints = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + step * i as f64, variant))
        .collect::<Result<Vec<_>>>()?;
    // pin the ends so round-off never leaves the requested band
    breakpoints[0] = fmin;
    breakpoints[n_mels + 1] = fmax;

    let bin_hz = f64::from(sample_rate) / n_fft as f64;
    let mut weights = vec![0.0; n_mels * n_bins];
    let mut degenerate_rows = Vec::new();
    for i in 0..n_mels {
        let (lo, mid, hi) = (breakpoints[i], breakpoints[i + 1], breakpoints[i + 2]);
        let row = &mut weights[i * n_bins..(i + 1) * n_bins];
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            let rising = (f - lo) / (mid - lo);
            let falling = (hi - f) / (hi - mid);
            *w = rising.min(falling).max(0.0);
        }
        let peak = row.iter().copied().fold(0.0, f64::max);
        if peak == 0.0 {
            degenerate_rows.push(i);
            continue;
        }
        let scale = match normalization {
            Normalization::None => 1.0 / peak,
            Normalization::SlaneyArea => 2.0 / (hi - lo),
        };
        row.iter_mut().for_each(|w| *w *= scale);
    }

    Ok(MelFilterbank {
        n_mels,
        n_bins,
        weights,
        breakpoints,
        fmin,
        fmax,
        variant,
        normalization,
        degenerate_rows,
    })
}

/// Project a linear power spectrogram onto mel bands.
pub fn apply_filterbank(spec: &Spectrogram, fb: &MelFilterbank) -> Result<Spectrogram> {
    apply_weights(spec, fb.weights(), fb.n_mels())
}

/// Left-multiply a linear power spectrogram by an arbitrary non-negative
/// `out_rows × spec.rows()` weight matrix.
pub fn apply_weights(spec: &Spectrogram, weights: &[f64], out_rows: usize) -> Result<Spectrogram> {
    if spec.kind() != SpectrogramKind::Linear || spec.scale() != Scale::Power {
        return Err(Error::Validation(
            "filterbanks apply to linear power spectrograms only".into(),
        ));
    }
    let inner = spec.rows();
    if weights.len() != out_rows * inner {
        return Err(Error::Shape(format!(
            "filterbank has {} weights, need {out_rows} x {inner}",
            weights.len()
        )));
    }
    let cols = spec.cols();
    let mut out = vec![0.0; out_rows * cols];
    for (m, out_row) in out.chunks_exact_mut(cols.max(1)).enumerate().take(out_rows) {
        let w_row = &weights[m * inner..(m + 1) * inner];
        for (k, &w) in w_row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &v) in out_row.iter_mut().zip(spec.row(k)) {
                *o += w * v;
            }
        }
    }
    Spectrogram::new(
        out_rows,
        cols,
        out,
        Scale::Power,
        SpectrogramKind::Mel,
        spec.sample_rate(),
        spec.n_fft(),
        spec.hop_length(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        for v in [MelVariant::Htk, MelVariant::Slaney] {
            assert_eq!(hz_to_mel(0.0, v).unwrap(), 0.0);
            assert_eq!(mel_to_hz(0.0, v).unwrap(), 0.0);
        }
        assert!((hz_to_mel(700.0, MelVariant::Htk).unwrap() - 2595.0 * 2f64.log10()).abs() < 1e-12);
        assert!((hz_to_mel(700.0, MelVariant::Htk).unwrap() - 781.1728).abs() < 1e-4);
        assert_eq!(hz_to_mel(1000.0, MelVariant::Slaney).unwrap(), 15.0);
        assert_eq!(mel_to_hz(15.0, MelVariant::Slaney).unwrap(), 1000.0);
    }

    #[test]
    fn domain_errors() {
        assert!(hz_to_mel(-1.0, MelVariant::Htk).is_err());
        assert!(mel_to_hz(-0.5, MelVariant::Slaney).is_err());
        assert!(hz_to_mel(f64::NAN, MelVariant::Slaney).is_err());
    }

    #[test]
    fn inverse_on_musical_frequencies() {
        for v in [MelVariant::Htk, MelVariant::Slaney] {
            for f in [55.0, 440.0, 4186.0, 11025.0] {
                let back = mel_to_hz(hz_to_mel(f, v).unwrap(), v).unwrap();
                assert!((back - f).abs() / f < 1e-6);
            }
        }
    }

    #[test]
    fn filterbank_errors() {
        let fb = |fmin, fmax, n| mel_filterbank(22050, 2048, n, fmin, fmax, MelVariant::Slaney, Normalization::None);
        assert!(fb(0.0, 12000.0, 10).is_err());
        assert!(fb(500.0, 500.0, 10).is_err());
        assert!(fb(0.0, 8000.0, 0).is_err());
    }

    #[test]
    fn too_many_mels_reports_empty_rows() {
        let fb = mel_filterbank(8000, 64, 40, 0.0, 4000.0, MelVariant::Htk, Normalization::None).unwrap();
        assert!(!fb.degenerate_rows().is_empty());
        for &r in fb.degenerate_rows() {
            assert!(fb.row(r).iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn slaney_area_is_a_rescaled_triangle() {
        let raw = mel_filterbank(22050, 512, 20, 0.0, 11025.0, MelVariant::Slaney, Normalization::None).unwrap();
        let area = mel_filterbank(22050, 512, 20, 0.0, 11025.0, MelVariant::Slaney, Normalization::SlaneyArea).unwrap();
        let pts = raw.breakpoints();
        for i in 0..20 {
            // undo the area factor to get the sampled triangle, then unit-peak it
            let tri: Vec<f64> = area.row(i).iter().map(|w| w * (pts[i + 2] - pts[i]) / 2.0).collect();
            let peak = tri.iter().copied().fold(0.0, f64::max);
            assert!(peak > 0.0 && peak <= 1.0 + 1e-12);
            for (t, r) in tri.iter().zip(raw.row(i)) {
                assert!((t / peak - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hand_matrix_product() {
        let spec = Spectrogram::new(2, 2, vec![1.0, 2.0, 3.0, 4.0], Scale::Power, SpectrogramKind::Linear, 8, 2, 1).unwrap();
        let out = apply_weights(&spec, &[0.5, 0.5], 1).unwrap();
        assert_eq!(out.values(), &[2.0, 3.0]);
        assert_eq!(out.kind(), SpectrogramKind::Mel);

        let ones = apply_weights(&spec, &[1.0, 1.0], 1).unwrap();
        assert_eq!(ones.values(), &[4.0, 6.0]);

        assert!(matches!(apply_weights(&spec, &[1.0; 3], 1), Err(Error::Shape(_))));
        let fb = mel_filterbank(8000, 64, 4, 0.0, 4000.0, MelVariant::Htk, Normalization::None).unwrap();
        assert!(matches!(apply_filterbank(&spec, &fb), Err(Error::Shape(_))));
    }
}
