use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const SPG_MAGIC: &[u8; 4] = b"SPG1";
const SPG_HEADER_LEN: usize = 4 + 4 + 4 + 1 + 1 + 4 + 4 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scale {
    Power,
    Decibel,
}

impl Scale {
    fn code(self) -> u8 {
        match self {
            Scale::Power => 0,
            Scale::Decibel => 1,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Scale::Power),
            1 => Ok(Scale::Decibel),
            c => Err(Error::Parse(format!("unknown scale code {c}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectrogramKind {
    Linear,
    Mel,
}

impl SpectrogramKind {
    pub const ALL: [SpectrogramKind; 2] = [SpectrogramKind::Linear, SpectrogramKind::Mel];

    pub fn as_str(self) -> &'static str {
        match self {
            SpectrogramKind::Linear => "linear",
            SpectrogramKind::Mel => "mel",
        }
    }

    fn code(self) -> u8 {
        match self {
            SpectrogramKind::Linear => 0,
            SpectrogramKind::Mel => 1,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(SpectrogramKind::Linear),
            1 => Ok(SpectrogramKind::Mel),
            c => Err(Error::Parse(format!("unknown kind code {c}"))),
        }
    }
}

impl std::fmt::Display for SpectrogramKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SpectrogramKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(SpectrogramKind::Linear),
            "mel" => Ok(SpectrogramKind::Mel),
            other => Err(Error::Parse(format!("unknown spectrogram kind {other:?}"))),
        }
    }
}

/// Band × frame matrix stored row-major (one row per frequency or mel band).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    scale: Scale,
    kind: SpectrogramKind,
    sample_rate: u32,
    n_fft: usize,
    hop_length: usize,
}

impl Spectrogram {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        scale: Scale,
        kind: SpectrogramKind,
        sample_rate: u32,
        n_fft: usize,
        hop_length: usize,
    ) -> Result<Self> {
        if rows * cols != values.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if kind == SpectrogramKind::Linear && rows != n_fft / 2 + 1 {
            return Err(Error::Shape(format!(
                "linear spectrogram with n_fft {n_fft} must have {} rows, got {rows}",
                n_fft / 2 + 1
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite spectrogram value {v}")));
        }
        if scale == Scale::Power {
            if let Some(v) = values.iter().find(|&&v| v < 0.0) {
                return Err(Error::Domain(format!("negative power value {v}")));
            }
        }
        Ok(Self {
            rows,
            cols,
            values,
            scale,
            kind,
            sample_rate,
            n_fft,
            hop_length,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn kind(&self) -> SpectrogramKind {
        self.kind
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn hop_length(&self) -> usize {
        self.hop_length
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    /// Same metadata, new values (re-validated).
    pub(crate) fn with_values(&self, values: Vec<f64>, scale: Scale) -> Result<Self> {
        Spectrogram::new(
            self.rows,
            self.cols,
            values,
            scale,
            self.kind,
            self.sample_rate,
            self.n_fft,
            self.hop_length,
        )
    }

    /// Serialize as an `SPG1` tensor (values narrowed to `f32`).
    pub fn to_spg_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(SPG_HEADER_LEN + self.values.len() * 4);
        out.extend_from_slice(SPG_MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        out.push(self.scale.code());
        out.push(self.kind.code());
        out.extend_from_slice(&self.sample_rate.to_le_bytes());
        out.extend_from_slice(&(self.n_fft as u32).to_le_bytes());
        out.extend_from_slice(&(self.hop_length as u32).to_le_bytes());
        for &v in &self.values {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_spg_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < SPG_HEADER_LEN || &bytes[..4] != SPG_MAGIC {
            return Err(Error::Parse("not an SPG1 tensor".into()));
        }
        let u32_at = |at: usize| u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]);
        let rows = u32_at(4) as usize;
        let cols = u32_at(8) as usize;
        let scale = Scale::from_code(bytes[12])?;
        let kind = SpectrogramKind::from_code(bytes[13])?;
        let sample_rate = u32_at(14);
        let n_fft = u32_at(18) as usize;
        let hop = u32_at(22) as usize;
        let payload = &bytes[SPG_HEADER_LEN..];
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::Parse("SPG1 dimensions overflow".into()))?;
        if payload.len() != expected {
            return Err(Error::Truncated(format!(
                "SPG1 payload is {} bytes, header implies {expected}",
                payload.len()
            )));
        }
        let values = payload
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
            .collect();
        Spectrogram::new(rows, cols, values, scale, kind, sample_rate, n_fft, hop)
    }
}

pub fn write_spg(spec: &Spectrogram, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, spec.to_spg_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_spg(path: impl AsRef<Path>) -> Result<Spectrogram> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Spectrogram::from_spg_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Spectrogram {
        Spectrogram::new(
            3,
            2,
            vec![0.0, 1.5, -2.25, 3.0, 4.0, -80.0],
            Scale::Decibel,
            SpectrogramKind::Linear,
            22050,
            4,
            2,
        )
        .unwrap()
    }

    #[test]
    fn spg_layout() {
        let bytes = small().to_spg_bytes();
        assert_eq!(&bytes[..4], b"SPG1");
        assert_eq!(&bytes[4..8], &3u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(bytes[12], 1);
        assert_eq!(bytes[13], 0);
        assert_eq!(&bytes[14..18], &22050u32.to_le_bytes());
        assert_eq!(&bytes[18..22], &4u32.to_le_bytes());
        assert_eq!(&bytes[22..26], &2u32.to_le_bytes());
        assert_eq!(&bytes[26..30], &0f32.to_le_bytes());
        assert_eq!(&bytes[30..34], &1.5f32.to_le_bytes());
        assert_eq!(bytes.len(), 26 + 6 * 4);
        assert_eq!(Spectrogram::from_spg_bytes(&bytes).unwrap(), small());
    }

    #[test]
    fn spg_rejects_garbage() {
        assert!(Spectrogram::from_spg_bytes(b"SPG0").is_err());
        let mut bytes = small().to_spg_bytes();
        bytes.pop();
        assert!(matches!(Spectrogram::from_spg_bytes(&bytes), Err(Error::Truncated(_))));
    }

    #[test]
    fn invariants_enforced() {
        assert!(Spectrogram::new(2, 2, vec![0.0; 3], Scale::Power, SpectrogramKind::Mel, 1, 4, 1).is_err());
        assert!(Spectrogram::new(1, 1, vec![-1.0], Scale::Power, SpectrogramKind::Mel, 1, 4, 1).is_err());
        assert!(Spectrogram::new(1, 1, vec![f64::NAN], Scale::Decibel, SpectrogramKind::Mel, 1, 4, 1).is_err());
        assert!(Spectrogram::new(2, 1, vec![0.0; 2], Scale::Power, SpectrogramKind::Linear, 1, 8, 1).is_err());
    }
}
