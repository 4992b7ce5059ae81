//! Image representation, PGM/PNG decoding, intensity statistics, and the
//! statistical global binarization that opens the pipeline.
//!
//! The threshold is `max_intensity - sigma` where sigma is the population
//! standard deviation of all pixels; a pixel is foreground (ink) iff its
//! intensity is strictly below the threshold.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// `data` must hold exactly `width * height` intensities, row-major.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, intensity: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            vec![intensity; width as usize * height as usize],
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }
}

/// Whole-image intensity statistics and the derived binarization threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageStats {
    pub max_intensity: u8,
    pub mean: f64,
    /// Population standard deviation over all pixels.
    pub sigma: f64,
    /// `max_intensity - sigma`.
    pub threshold: f64,
}

/// Foreground/background partition of an image. `true` marks ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    foreground: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, foreground: Vec<bool>) -> Result<Self> {
        if foreground.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "mask buffer length {} does not match {width}x{height}",
                foreground.len()
            )));
        }
        Ok(Self {
            width,
            height,
            foreground,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.foreground
    }

    #[inline]
    pub fn is_foreground(&self, x: u32, y: u32) -> bool {
        self.foreground[y as usize * self.width as usize + x as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.foreground.iter().filter(|&&f| f).count()
    }

    /// Debug rendering: ink black (0) on white paper (255).
    pub fn to_gray(&self) -> GrayImage {
        let data = self
            .foreground
            .iter()
            .map(|&f| if f { 0 } else { 255 })
            .collect();
        GrayImage::new(self.width, self.height, data).expect("mask dimensions are valid")
    }
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Decode an encoded image into a grayscale raster.
///
/// Accepts binary PGM (P5, maxval 255), 8-bit grayscale PNG, and 8-bit RGB
/// PNG. RGB is reduced with the integer luma combination
/// `round(0.299 R + 0.587 G + 0.114 B)`, ties rounding up.
pub fn load_gray(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.len() < 2 {
        Err(Error::TruncatedHeader("missing magic number"))
    } else {
        Err(Error::UnsupportedFormat)
    }
}

/// Integer-rounded BT.601 luma, exact for R=G=B.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000) as u8
}

fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cursor = 2; // past "P5"
    let width = read_header_int(bytes, &mut cursor, "width")?;
    let height = read_header_int(bytes, &mut cursor, "height")?;
    let maxval = read_header_int(bytes, &mut cursor, "maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(cursor) {
        Some(b) if b.is_ascii_whitespace() => cursor += 1,
        Some(_) => {
            return Err(Error::MalformedHeader(
                "expected single whitespace before payload".into(),
            ))
        }
        None => return Err(Error::TruncatedHeader("payload separator")),
    }
    let expected = width as usize * height as usize;
    let payload = &bytes[cursor..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    GrayImage::new(width, height, payload[..expected].to_vec())
}

/// Read one whitespace-delimited decimal field, skipping `#` comment lines.
fn read_header_int(bytes: &[u8], cursor: &mut usize, field: &'static str) -> Result<u32> {
    loop {
        match bytes.get(*cursor) {
            Some(b) if b.is_ascii_whitespace() => *cursor += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*cursor) {
                    *cursor += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(Error::TruncatedHeader(field)),
        }
    }
    let start = *cursor;
    while let Some(b) = bytes.get(*cursor) {
        if b.is_ascii_digit() {
            *cursor += 1;
        } else {
            break;
        }
    }
    if *cursor == start {
        return Err(Error::MalformedHeader(format!(
            "expected decimal {field}, found byte {:#04x}",
            bytes[start]
        )));
    }
    let text = std::str::from_utf8(&bytes[start..*cursor]).expect("digits are ascii");
    text.parse::<u32>()
        .map_err(|_| Error::MalformedHeader(format!("{field} out of range: {text}")))
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedPng(format!(
            "bit depth {:?}, expected 8",
            info.bit_depth
        )));
    }
    let (width, height) = (info.width, info.height);
    let n = width as usize * height as usize;
    let data = match info.color_type {
        png::ColorType::Grayscale => buf[..n].to_vec(),
        png::ColorType::Rgb => buf[..3 * n]
            .chunks_exact(3)
            .map(|px| luma(px[0], px[1], px[2]))
            .collect(),
        other => {
            return Err(Error::UnsupportedPng(format!(
                "color type {other:?}, expected 8-bit gray or RGB"
            )))
        }
    };
    GrayImage::new(width, height, data)
}

/// Encode as binary PGM (P5, maxval 255).
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

// ---------------------------------------------------------------------------
// Statistics and binarization
// ---------------------------------------------------------------------------

/// Max, mean, population sigma, and the threshold `max - sigma`.
///
/// Sums are accumulated in exact integer arithmetic; sigma is derived from
/// `n*sum_sq - sum^2` so no precision is lost before the final square root.
pub fn compute_stats(img: &GrayImage) -> ImageStats {
    let (max, sum, sum_sq) = intensity_moments(img.pixels());
    let n = img.pixels().len() as u64;
    let mean = sum as f64 / n as f64;
    let variance_numerator = u128::from(n) * u128::from(sum_sq) - u128::from(sum) * u128::from(sum);
    let sigma = (variance_numerator as f64).sqrt() / n as f64;
    ImageStats {
        max_intensity: max,
        mean,
        sigma,
        threshold: max as f64 - sigma,
    }
}

#[cfg(feature = "parallel")]
fn intensity_moments(pixels: &[u8]) -> (u8, u64, u64) {
    pixels.par_chunks(1 << 16).map(moments_chunk).reduce(
        || (0u8, 0u64, 0u64),
        |a, b| (a.0.max(b.0), a.1 + b.1, a.2 + b.2),
    )
}

#[cfg(not(feature = "parallel"))]
fn intensity_moments(pixels: &[u8]) -> (u8, u64, u64) {
    moments_chunk(pixels)
}

fn moments_chunk(chunk: &[u8]) -> (u8, u64, u64) {
    let mut max = 0u8;
    let mut sum = 0u64;
    let mut sum_sq = 0u64;
    for &p in chunk {
        max = max.max(p);
        sum += p as u64;
        sum_sq += p as u64 * p as u64;
    }
    (max, sum, sum_sq)
}

/// Partition pixels: foreground iff intensity is strictly below `max - sigma`.
pub fn binarize(img: &GrayImage) -> BinaryMask {
    let threshold = compute_stats(img).threshold;
    binarize_with_threshold(img, threshold)
}

pub fn binarize_with_threshold(img: &GrayImage, threshold: f64) -> BinaryMask {
    #[cfg(feature = "parallel")]
    let foreground: Vec<bool> = img
        .pixels()
        .par_iter()
        .map(|&p| (p as f64) < threshold)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let foreground: Vec<bool> = img
        .pixels()
        .iter()
        .map(|&p| (p as f64) < threshold)
        .collect();
    BinaryMask::new(img.width(), img.height(), foreground).expect("image dimensions are valid")
}
