use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

use super::fft::{fft_in_place, Complex};
use super::spectrogram::{Scale, Spectrogram, SpectrogramKind};
use super::window::hann_window;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftParams {
    pub n_fft: usize,
    pub hop_length: usize,
    pub centered: bool,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            n_fft: super::DEFAULT_N_FFT,
            hop_length: super::DEFAULT_HOP,
            centered: true,
        }
    }
}

/// Index into `x` extended by mirror reflection about its end samples
/// (edge samples are not repeated).
fn reflect_index(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let m = i.rem_euclid(period);
    if m < len as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Hann-windowed power STFT of a mono buffer.
pub fn stft_power(buffer: &AudioBuffer, params: StftParams) -> Result<Spectrogram> {
    stft_power_samples(&buffer.to_f64(), buffer.sample_rate(), params)
}

/// Power STFT over raw samples. Rows are bins `0..=n_fft/2`, columns are
/// frames at stride `hop_length`. Centered analysis reflect-pads by
/// `n_fft/2` on both sides, giving `1 + len/hop` frames.
pub fn stft_power_samples(samples: &[f64], sample_rate: u32, params: StftParams) -> Result<Spectrogram> {
    let StftParams {
        n_fft,
        hop_length,
        centered,
    } = params;
    if n_fft == 0 || !n_fft.is_power_of_two() {
        return Err(Error::Domain(format!("n_fft {n_fft} must be a power of two")));
    }
    if hop_length == 0 || hop_length > n_fft {
        return Err(Error::Domain(format!(
            "hop length {hop_length} must lie in 1..={n_fft}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("cannot analyse an empty buffer"));
    }
    let len = samples.len();
    let (n_frames, offset) = if centered {
        (1 + len / hop_length, -((n_fft / 2) as isize))
    } else {
        if len < n_fft {
            return Err(Error::InsufficientData(format!(
                "{len} samples is shorter than one {n_fft}-sample frame"
            )));
        }
        (1 + (len - n_fft) / hop_length, 0)
    };

    let window = hann_window(n_fft)?;
    let n_bins = n_fft / 2 + 1;
    let mut values = vec![0.0; n_bins * n_frames];
    let mut frame = vec![Complex::ZERO; n_fft];
    for t in 0..n_frames {
        let start = offset + (t * hop_length) as isize;
        for (k, slot) in frame.iter_mut().enumerate() {
            let i = start + k as isize;
            let x = if centered {
                samples[reflect_index(i, len)]
            } else {
                samples[i as usize]
            };
            *slot = Complex::new(x * window[k], 0.0);
        }
        fft_in_place(&mut frame)?;
        for (f, c) in frame.iter().take(n_bins).enumerate() {
            values[f * n_frames + t] = c.norm_sqr();
        }
    }
    Spectrogram::new(
        n_bins,
        n_frames,
        values,
        Scale::Power,
        SpectrogramKind::Linear,
        sample_rate,
        n_fft,
        hop_length,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reflect_matches_numpy() {
        // np.pad([0,1,2,3], 3, mode="reflect") -> [3,2,1,0,1,2,3,2,1,0]
        let got: Vec<usize> = (-3..7).map(|i| reflect_index(i, 4)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
    }

    #[test]
    fn frame_counts() {
        let x = vec![0.0; 22050];
        let centered = stft_power_samples(&x, 22050, StftParams::default()).unwrap();
        assert_eq!(centered.cols(), 44);
        assert_eq!(centered.rows(), 1025);
        assert!(centered.values().iter().all(|&v| v == 0.0));

        let p = StftParams { n_fft: 1024, hop_length: 256, centered: false };
        assert_eq!(stft_power_samples(&x, 22050, p).unwrap().cols(), 1 + (22050 - 1024) / 256);
        assert!(matches!(
            stft_power_samples(&x[..100], 22050, p),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn parameter_errors() {
        let x = vec![0.0; 4096];
        let bad = |n_fft, hop_length| stft_power_samples(&x, 8000, StftParams { n_fft, hop_length, centered: true });
        assert!(bad(1000, 256).is_err());
        assert!(bad(1024, 0).is_err());
        assert!(bad(1024, 2048).is_err());
        assert!(stft_power_samples(&[], 8000, StftParams::default()).is_err());
    }

    #[test]
    fn bin_centered_sine_peaks_at_its_row() {
        let sr = 8192u32;
        let n_fft = 256;
        let f = 4.0 * f64::from(sr) / n_fft as f64;
        let x: Vec<f64> = (0..4096).map(|n| (2.0 * PI * f * n as f64 / f64::from(sr)).sin()).collect();
        let spec = stft_power_samples(&x, sr, StftParams { n_fft, hop_length: 64, centered: true }).unwrap();
        // interior frames only: the padded edges reflect the waveform
        for t in 4..spec.cols() - 4 {
            let col: Vec<f64> = (0..spec.rows()).map(|r| spec.get(r, t)).collect();
            let argmax = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert_eq!(argmax, 4, "frame {t}");
        }
    }
}
