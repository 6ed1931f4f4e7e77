//! Spectral analysis: FFT, STFT power spectrograms, mel filterbanks, and
//! decibel scaling.

mod db;
pub mod fft;
mod mel;
mod spectrogram;
mod stft;
mod window;

pub use db::{power_to_db, DbReference};
pub use mel::{
    apply_filterbank, apply_weights, hz_to_mel, mel_filterbank, mel_to_hz, MelFilterbank,
    MelVariant, Normalization,
};
pub use spectrogram::{read_spg, write_spg, Scale, Spectrogram, SpectrogramKind, SPG_MAGIC};
pub use stft::{stft_power, stft_power_samples, StftParams};
pub use window::hann_window;

/// Extraction defaults matching the common MIR library conventions.
pub const DEFAULT_N_FFT: usize = 2048;
pub const DEFAULT_HOP: usize = 512;
pub const DEFAULT_N_MELS: usize = 128;
pub const DEFAULT_AMIN: f64 = 1e-10;
pub const DEFAULT_TOP_DB: f64 = 80.0;
