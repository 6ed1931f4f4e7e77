//! Audio ingestion: RIFF/WAVE decoding to mono, linear resampling, and tone
//! synthesis for test corpora.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Canonical analysis rate for the extraction pipeline.
pub const CANONICAL_SAMPLE_RATE: u32 = 22_050;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Mono sample buffer with amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate: u32,
    source_id: String,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Domain("sample rate must be positive".into()));
        }
        if let Some(pos) = samples
            .iter()
            .position(|s| !s.is_finite() || s.abs() > 1.0)
        {
            return Err(Error::Domain(format!(
                "sample {pos} = {} is not a finite value in [-1, 1]",
                samples[pos]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Samples widened to `f64` for analysis.
    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| f64::from(s)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn le_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk> {
    if body.len() < 16 {
        return Err(Error::Format(format!("fmt chunk is {} bytes, need 16", body.len())));
    }
    let mut format = le_u16(body, 0);
    if format == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the subformat GUID,
        // whose first two bytes carry the actual format tag.
        if body.len() < 26 {
            return Err(Error::Format("extensible fmt chunk too short".into()));
        }
        format = le_u16(body, 24);
    }
    Ok(FmtChunk {
        format,
        channels: le_u16(body, 2),
        sample_rate: le_u32(body, 4),
        bits_per_sample: le_u16(body, 14),
    })
}

/// Decode a WAV file into a mono buffer.
pub fn decode_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav_bytes(&bytes, path.display().to_string())
}

/// Decode an in-memory RIFF/WAVE image. Channels are averaged to mono and
/// 16-bit PCM is scaled by 1/32768.
pub fn decode_wav_bytes(bytes: &[u8], source_id: impl Into<String>) -> Result<AudioBuffer> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Format("missing RIFF/WAVE header".into()));
    }

    let mut fmt = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = le_u32(bytes, at + 4) as usize;
        let body_start = at + 8;
        let available = bytes.len() - body_start;
        match id {
            b"fmt " => {
                if size > available {
                    return Err(Error::Format("fmt chunk runs past end of file".into()));
                }
                fmt = Some(parse_fmt(&bytes[body_start..body_start + size])?);
            }
            b"data" => {
                if size > available {
                    return Err(Error::Truncated(format!(
                        "data chunk declares {size} bytes but only {available} remain"
                    )));
                }
                data = Some(&bytes[body_start..body_start + size]);
            }
            _ => {}
        }
        // chunks are word aligned
        at = body_start.saturating_add(size).saturating_add(size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::Format("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::Format("no data chunk".into()))?;

    if fmt.channels == 0 || fmt.sample_rate == 0 {
        return Err(Error::Format("zero channels or sample rate".into()));
    }
    if fmt.channels > 2 {
        return Err(Error::UnsupportedCodec(format!("{} channels", fmt.channels)));
    }
    let channels = usize::from(fmt.channels);

    let interleaved: Vec<f32> = match (fmt.format, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => data
            .chunks_exact(2)
            .map(|c| f32::from(i16::from_le_bytes([c[0], c[1]])) / 32768.0)
            .collect(),
        (FORMAT_IEEE_FLOAT, 32) => {
            let mut out = Vec::with_capacity(data.len() / 4);
            for c in data.chunks_exact(4) {
                let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                if !v.is_finite() {
                    return Err(Error::Format("non-finite float sample".into()));
                }
                out.push(v.clamp(-1.0, 1.0));
            }
            out
        }
        (format, bits) => {
            return Err(Error::UnsupportedCodec(format!(
                "format tag {format:#06x} with {bits} bits per sample"
            )))
        }
    };
    if interleaved.len() % channels != 0 {
        return Err(Error::Truncated("partial sample frame at end of data".into()));
    }

    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(2)
            .map(|f| (f[0] + f[1]) * 0.5)
            .collect()
    };
    AudioBuffer::new(samples, fmt.sample_rate, source_id)
}

fn wav_header(format: u16, bits: u16, sample_rate: u32, data_len: usize) -> Vec<u8> {
    let block_align = bits / 8;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * u32::from(block_align)).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    out
}

/// Mono 32-bit float WAV image. Decoding it reproduces the samples exactly.
pub fn encode_wav_f32(buffer: &AudioBuffer) -> Vec<u8> {
    let mut out = wav_header(FORMAT_IEEE_FLOAT, 32, buffer.sample_rate, buffer.len() * 4);
    for s in &buffer.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

/// Mono 16-bit PCM WAV image (samples scaled by 32768, rounded, clipped).
pub fn encode_wav_pcm16(buffer: &AudioBuffer) -> Vec<u8> {
    let mut out = wav_header(FORMAT_PCM, 16, buffer.sample_rate, buffer.len() * 2);
    for &s in &buffer.samples {
        let q = (f64::from(s) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

pub fn write_wav_f32(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_wav_f32(buffer)).map_err(|e| Error::io(path, e))
}

pub fn write_wav_pcm16(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_wav_pcm16(buffer)).map_err(|e| Error::io(path, e))
}

/// Linear-interpolation resampling. Output length is
/// `round(len * target / source)`; equal rates return a clone.
pub fn resample_linear(buffer: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer> {
    if target_rate == 0 {
        return Err(Error::Domain("target rate must be positive".into()));
    }
    if buffer.is_empty() {
        return Err(Error::EmptyInput("cannot resample an empty buffer"));
    }
    if target_rate == buffer.sample_rate {
        return Ok(buffer.clone());
    }
    let src = &buffer.samples;
    let ratio = f64::from(buffer.sample_rate) / f64::from(target_rate);
    let out_len = (src.len() as f64 / ratio).round() as usize;
    let last = src.len() - 1;
    let samples = (0..out_len)
        .map(|j| {
            let pos = j as f64 * ratio;
            let i = (pos.floor() as usize).min(last);
            let frac = pos - i as f64;
            let a = f64::from(src[i]);
            if i == last || frac == 0.0 {
                return a as f32;
            }
            let b = f64::from(src[i + 1]);
            (a + (b - a) * frac) as f32
        })
        .collect();
    AudioBuffer::new(samples, target_rate, buffer.source_id.clone())
}

/// `amplitude * sin(2π f n / sr)` for `round(duration * sr)` samples.
pub fn synth_tone(freq: f64, duration: f64, sample_rate: u32, amplitude: f64) -> Result<AudioBuffer> {
    let nyquist = f64::from(sample_rate) / 2.0;
    if sample_rate == 0 {
        return Err(Error::Domain("sample rate must be positive".into()));
    }
    if !(freq > 0.0) {
        return Err(Error::Domain(format!("tone frequency {freq} must be positive")));
    }
    if freq >= nyquist {
        return Err(Error::Aliasing { freq, nyquist });
    }
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::Domain(format!("amplitude {amplitude} outside [0, 1]")));
    }
    if !(duration >= 0.0) {
        return Err(Error::Domain(format!("duration {duration} must be non-negative")));
    }
    let n = (duration * f64::from(sample_rate)).round() as usize;
    let w = 2.0 * PI * freq / f64::from(sample_rate);
    let samples = (0..n)
        .map(|k| (amplitude * (w * k as f64).sin()) as f32)
        .collect();
    AudioBuffer::new(samples, sample_rate, format!("tone:{freq}Hz"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm16_stereo(frames: &[(i16, i16)], rate: u32) -> Vec<u8> {
        let data_len = frames.len() * 4;
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * 4).to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data_len as u32).to_le_bytes());
        for (l, r) in frames {
            out.extend_from_slice(&l.to_le_bytes());
            out.extend_from_slice(&r.to_le_bytes());
        }
        out
    }

    #[test]
    fn one_second_of_silence() {
        let buf = AudioBuffer::new(vec![0.0; 22050], 22050, "s").unwrap();
        let decoded = decode_wav_bytes(&encode_wav_pcm16(&buf), "s").unwrap();
        assert_eq!(decoded.len(), 22050);
        assert_eq!(decoded.sample_rate(), 22050);
        assert!(decoded.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn opposite_stereo_channels_cancel() {
        let frames = vec![(16384i16, -16384i16); 100];
        let buf = decode_wav_bytes(&pcm16_stereo(&frames, 8000), "st").unwrap();
        assert_eq!(buf.len(), 100);
        assert!(buf.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn most_negative_pcm_is_minus_one() {
        let buf = decode_wav_bytes(&pcm16_stereo(&[(-32768, -32768)], 8000), "m").unwrap();
        assert_eq!(buf.samples(), &[-1.0]);
    }

    #[test]
    fn unknown_chunks_are_skipped() {
        let buf = AudioBuffer::new(vec![0.25, -0.5], 8000, "x").unwrap();
        let plain = encode_wav_f32(&buf);
        // splice a LIST chunk with odd size (plus pad byte) before fmt
        let mut bytes = plain[..12].to_vec();
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&3u32.to_le_bytes());
        bytes.extend_from_slice(&[1, 2, 3, 0]);
        bytes.extend_from_slice(&plain[12..]);
        let decoded = decode_wav_bytes(&bytes, "x").unwrap();
        assert_eq!(decoded.samples(), buf.samples());
    }

    #[test]
    fn header_errors() {
        assert!(matches!(decode_wav_bytes(b"RIFX0000WAVE", "x"), Err(Error::Format(_))));
        assert!(matches!(decode_wav_bytes(b"RIFF", "x"), Err(Error::Format(_))));

        let mut adpcm = encode_wav_pcm16(&AudioBuffer::new(vec![0.0; 4], 8000, "x").unwrap());
        adpcm[20] = 2; // format tag = ADPCM
        assert!(matches!(decode_wav_bytes(&adpcm, "x"), Err(Error::UnsupportedCodec(_))));

        let mut truncated = encode_wav_pcm16(&AudioBuffer::new(vec![0.0; 8], 8000, "x").unwrap());
        truncated.truncate(truncated.len() - 6);
        assert!(matches!(decode_wav_bytes(&truncated, "x"), Err(Error::Truncated(_))));

        let no_data = &encode_wav_pcm16(&AudioBuffer::new(vec![], 8000, "x").unwrap())[..36];
        assert!(matches!(decode_wav_bytes(no_data, "x"), Err(Error::Format(_))));
    }

    #[test]
    fn resample_identity_and_hand_values() {
        let buf = AudioBuffer::new(vec![0.0, 1.0, 0.0, -1.0], 4, "r").unwrap();
        assert_eq!(resample_linear(&buf, 4).unwrap(), buf);
        let half = resample_linear(&buf, 2).unwrap();
        assert_eq!(half.samples(), &[0.0, 0.0]);
        assert_eq!(half.sample_rate(), 2);

        let up = resample_linear(&buf, 8).unwrap();
        assert_eq!(up.samples(), &[0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -1.0, -1.0]);
    }

    #[test]
    fn resample_errors() {
        let empty = AudioBuffer::new(vec![], 4, "e").unwrap();
        assert!(matches!(resample_linear(&empty, 2), Err(Error::EmptyInput(_))));
        let one = AudioBuffer::new(vec![0.1], 4, "e").unwrap();
        assert!(resample_linear(&one, 0).is_err());
    }

    #[test]
    fn tone_contracts() {
        assert!(matches!(synth_tone(11025.0, 1.0, 22050, 0.5), Err(Error::Aliasing { .. })));
        let silent = synth_tone(440.0, 0.1, 22050, 0.0).unwrap();
        assert!(silent.samples().iter().all(|&s| s == 0.0));

        let quarter = synth_tone(2000.0, 0.002, 8000, 1.0).unwrap();
        let expect = [0.0f32, 1.0, 0.0, -1.0];
        for (k, (&got, want)) in quarter.samples().iter().zip(expect.iter().cycle()).enumerate() {
            assert!((got - want).abs() < 1e-6, "sample {k}: {got} vs {want}");
        }
    }

    #[test]
    fn tone_rms() {
        // 200 cycles of 441 Hz
        let tone = synth_tone(441.0, 200.0 / 441.0, 22050, 0.8).unwrap();
        let rms = (tone.to_f64().iter().map(|s| s * s).sum::<f64>() / tone.len() as f64).sqrt();
        let want = 0.8 / 2f64.sqrt();
        assert!((rms - want).abs() / want < 0.01);
    }

    #[test]
    fn wav_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let buf = synth_tone(330.0, 0.05, 16000, 0.7).unwrap();
        write_wav_f32(&buf, &path).unwrap();
        let back = decode_wav(&path).unwrap();
        assert_eq!(back.samples(), buf.samples());
        assert!(matches!(decode_wav(dir.path().join("missing.wav")), Err(Error::Io { .. })));
    }
}
