//! Spectrogram images: viridis colormap and binary PPM output.

use std::fs;
use std::path::Path;

use crate::dsp::{Scale, Spectrogram};
use crate::error::{Error, Result};

/// Viridis sampled at 16 evenly spaced points.
const VIRIDIS: [[u8; 3]; 16] = [
    [68, 1, 84],
    [72, 26, 108],
    [71, 47, 125],
    [65, 68, 135],
    [57, 86, 140],
    [49, 104, 142],
    [42, 120, 142],
    [35, 136, 142],
    [31, 152, 139],
    [34, 168, 132],
    [53, 183, 121],
    [84, 197, 104],
    [122, 209, 81],
    [165, 219, 54],
    [210, 226, 27],
    [253, 231, 37],
];

pub type Rgb = [u8; 3];

/// Color for `t`, clamped to `[0, 1]` and linearly interpolated between the
/// embedded anchors. Non-finite input maps to the low end.
pub fn colormap_viridis(t: f64) -> Rgb {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pos = t * (VIRIDIS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(VIRIDIS.len() - 2);
    let frac = pos - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mut out = [0u8; 3];
    for c in 0..3 {
        let v = f64::from(a[c]) + (f64::from(b[c]) - f64::from(a[c])) * frac;
        out[c] = v.round() as u8;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Shape(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// RGBA bytes, e.g. for a canvas `ImageData`.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|p| [p[0], p[1], p[2], 255])
            .collect()
    }
}

/// One pixel per cell: columns are frames, rows are bands. Values are
/// min-max normalized (a constant matrix maps to 0.5). With `flip_vertical`
/// the lowest band is drawn at the bottom.
pub fn render_spectrogram(spec: &Spectrogram, flip_vertical: bool) -> Result<RasterImage> {
    if spec.is_empty() {
        return Err(Error::EmptyInput("cannot render an empty spectrogram"));
    }
    if spec.scale() != Scale::Decibel {
        return Err(Error::Validation("render expects a decibel spectrogram".into()));
    }
    let (lo, hi) = spec
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    let (width, height) = (spec.cols(), spec.rows());
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let band = if flip_vertical { height - 1 - y } else { y };
        for &v in spec.row(band) {
            let t = if range > 0.0 { (v - lo) / range } else { 0.5 };
            pixels.push(colormap_viridis(t));
        }
    }
    RasterImage::new(width, height, pixels)
}

/// Binary P6 image: `P6\n<w> <h>\n255\n` followed by RGB bytes.
pub fn encode_ppm(image: &RasterImage) -> Result<Vec<u8>> {
    if image.width == 0 || image.height == 0 {
        return Err(Error::EmptyInput("cannot encode a zero-sized image"));
    }
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.reserve(image.pixels.len() * 3);
    for p in &image.pixels {
        out.extend_from_slice(p);
    }
    Ok(out)
}

pub fn write_ppm(image: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_ppm(image)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parse a binary P6 image with maxval 255 (comments allowed in the header).
pub fn decode_ppm(bytes: &[u8]) -> Result<RasterImage> {
    let mut at = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while at < bytes.len() && (bytes[at].is_ascii_whitespace() || bytes[at] == b'#') {
            if bytes[at] == b'#' {
                while at < bytes.len() && bytes[at] != b'\n' {
                    at += 1;
                }
            } else {
                at += 1;
            }
        }
        let start = at;
        while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
            at += 1;
        }
        if start == at {
            return Err(Error::Parse("PPM header ended early".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..at]).into_owned());
    }
    // exactly one whitespace byte separates the header from the raster
    at += 1;
    if fields[0] != "P6" {
        return Err(Error::Parse(format!("expected P6 magic, found {:?}", fields[0])));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad PPM number {s:?}")));
    let (width, height, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(Error::Parse(format!("unsupported maxval {maxval}")));
    }
    let raster = bytes.get(at..).unwrap_or_default();
    if raster.len() != width * height * 3 {
        return Err(Error::Truncated(format!(
            "PPM raster has {} bytes, expected {}",
            raster.len(),
            width * height * 3
        )));
    }
    let pixels = raster.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    RasterImage::new(width, height, pixels)
}
