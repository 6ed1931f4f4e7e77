//! Building blocks for comparing linear-frequency and mel-scaled spectrograms
//! in multilabel music genre recognition.
//!
//! The crate covers the whole experimental path: WAV ingestion, STFT and mel
//! filterbanks, spectrogram rendering, multilabel manifests with stratified
//! test splits and balanced one-vs-all training subsets, a reference logistic
//! classifier, per-genre evaluation metrics, and the paired statistical
//! comparison (Shapiro–Wilk followed by a paired t-test).

pub mod audio;
pub mod dataset;
pub mod dsp;
pub mod error;
pub mod metrics;
pub mod model;
pub mod render;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
