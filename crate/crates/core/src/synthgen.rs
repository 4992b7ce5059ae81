//! Deterministic synthetic page generator with pixel-exact line ground truth.
//!
//! Pages are horizontal bands of filled ellipses and short strokes with
//! bounded vertical jitter; every ink pixel is tagged with its line id. All
//! randomness comes from the in-repo SplitMix64 stream, so a spec (seed
//! included) reproduces the page bit for bit on any platform.
//!
//! The first blob of every band is a full-height anchor stroke, which pins
//! the band's ink extent: at zero jitter a line's strip height equals
//! `line_height` exactly.

use serde::{Deserialize, Serialize};

use crate::ccl::{BBox, LabelMap};
use crate::error::{Error, Result};
use crate::eval::{GroundTruthFile, GroundTruthLine};
use crate::raster::GrayImage;
use crate::rng::SplitMix64;

/// Everything needed to render one page deterministically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub width: u32,
    pub height: u32,
    pub line_count: u32,
    pub line_height: u32,
    pub line_gap: u32,
    /// Max vertical perturbation of blob positions, in pixels.
    pub jitter: u32,
    pub blob_count_per_line: u32,
    pub blob_size_range: (u32, u32),
    pub ink_intensity_range: (u8, u8),
    pub background_intensity: u8,
    pub rng_seed: u64,
}

impl PageSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter(
                "width and height must be positive".into(),
            ));
        }
        if self.line_count >= 1 {
            if self.line_height == 0 {
                return Err(Error::InvalidParameter(
                    "line_height must be positive when line_count >= 1".into(),
                ));
            }
            if self.blob_count_per_line == 0 {
                return Err(Error::InvalidParameter(
                    "blob_count_per_line must be positive when line_count >= 1".into(),
                ));
            }
            let needed = self.line_count as u64 * self.line_height as u64
                + (self.line_count as u64 - 1) * self.line_gap as u64;
            if needed > self.height as u64 {
                return Err(Error::InvalidParameter(format!(
                    "line bands need {needed} rows but the page has {}: \
                     line_count*line_height + (line_count-1)*line_gap must fit",
                    self.height
                )));
            }
        }
        if self.blob_size_range.0 == 0 || self.blob_size_range.0 > self.blob_size_range.1 {
            return Err(Error::InvalidParameter(format!(
                "blob_size_range ({}, {}) must be ordered and positive",
                self.blob_size_range.0, self.blob_size_range.1
            )));
        }
        if self.ink_intensity_range.0 > self.ink_intensity_range.1 {
            return Err(Error::InvalidParameter(format!(
                "ink_intensity_range ({}, {}) must be ordered",
                self.ink_intensity_range.0, self.ink_intensity_range.1
            )));
        }
        if self.ink_intensity_range.1 >= self.background_intensity {
            return Err(Error::InvalidParameter(format!(
                "ink must be darker than paper: ink high {} >= background {}",
                self.ink_intensity_range.1, self.background_intensity
            )));
        }
        Ok(())
    }
}

/// Pixel-exact reference: per-pixel line labels and per-line tight boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub line_count: u32,
    pub label_map: LabelMap,
    pub line_bboxes: Vec<BBox>,
}

impl GroundTruth {
    pub fn to_gt_file(&self) -> GroundTruthFile {
        GroundTruthFile {
            line_count: self.line_count,
            lines: self
                .line_bboxes
                .iter()
                .map(|b| GroundTruthLine {
                    bbox: [b.x_min, b.y_min, b.x_max, b.y_max],
                })
                .collect(),
        }
    }

    /// Label-map PGM with pixel value k marking line k; needs fewer than 256 lines.
    pub fn to_label_gray(&self) -> Result<GrayImage> {
        if self.line_count > 255 {
            return Err(Error::InvalidParameter(format!(
                "label-map PGM supports at most 255 lines, page has {}",
                self.line_count
            )));
        }
        let data = self.label_map.as_slice().iter().map(|&l| l as u8).collect();
        GrayImage::new(self.label_map.width(), self.label_map.height(), data)
    }
}

struct Canvas {
    width: u32,
    height: u32,
    data: Vec<u8>,
    labels: Vec<u32>,
}

impl Canvas {
    #[inline]
    fn paint(&mut self, x: i64, y: i64, row_lo: i64, row_hi: i64, ink: u8, label: u32) {
        let y_lo = row_lo.max(0);
        let y_hi = row_hi.min(self.height as i64 - 1);
        if x < 0 || x >= self.width as i64 || y < y_lo || y > y_hi {
            return;
        }
        let idx = y as usize * self.width as usize + x as usize;
        self.data[idx] = ink;
        self.labels[idx] = label;
    }
}

/// Render a page and its ground truth. Same spec, same bits.
pub fn generate(spec: &PageSpec) -> Result<(GrayImage, GroundTruth)> {
    spec.validate()?;
    let width = spec.width;
    let height = spec.height;
    let mut canvas = Canvas {
        width,
        height,
        data: vec![spec.background_intensity; width as usize * height as usize],
        labels: vec![0u32; width as usize * height as usize],
    };

    if spec.line_count == 0 {
        let img = GrayImage::new(width, height, canvas.data)?;
        let label_map = LabelMap::new(width, height, canvas.labels)?;
        return Ok((
            img,
            GroundTruth {
                line_count: 0,
                label_map,
                line_bboxes: Vec::new(),
            },
        ));
    }

    let mut rng = SplitMix64::new(spec.rng_seed);
    let block = spec.line_count * spec.line_height + (spec.line_count - 1) * spec.line_gap;
    let top_margin = (height - block) / 2;

    for k in 0..spec.line_count {
        let label = k + 1;
        let band_top = (top_margin + k * (spec.line_height + spec.line_gap)) as i64;
        let band_bottom = band_top + spec.line_height as i64 - 1;
        // Jittered blobs may spill this far but no further.
        let row_lo = band_top - spec.jitter as i64;
        let row_hi = band_bottom + spec.jitter as i64;

        draw_anchor_stroke(&mut canvas, spec, &mut rng, band_top, row_lo, row_hi, label);
        for _ in 1..spec.blob_count_per_line {
            draw_blob(&mut canvas, spec, &mut rng, band_top, row_lo, row_hi, label);
        }
    }

    let line_bboxes = tight_boxes(&canvas.labels, width, spec.line_count)?;
    let img = GrayImage::new(width, height, canvas.data)?;
    let label_map = LabelMap::new(width, height, canvas.labels)?;
    Ok((
        img,
        GroundTruth {
            line_count: spec.line_count,
            label_map,
            line_bboxes,
        },
    ))
}

/// Full-height vertical stroke that fixes the band's ink extent.
fn draw_anchor_stroke(
    canvas: &mut Canvas,
    spec: &PageSpec,
    rng: &mut SplitMix64,
    band_top: i64,
    row_lo: i64,
    row_hi: i64,
    label: u32,
) {
    let thickness = rng.next_range(2, 3).min(spec.width as u64) as i64;
    let x0 = rng.next_below((spec.width as u64).saturating_sub(thickness as u64) + 1) as i64;
    let ink = rng.next_range(
        spec.ink_intensity_range.0 as u64,
        spec.ink_intensity_range.1 as u64,
    ) as u8;
    let shift = rng.next_signed(spec.jitter as u64);
    for dy in 0..spec.line_height as i64 {
        let y = band_top + shift + dy;
        for dx in 0..thickness {
            canvas.paint(x0 + dx, y, row_lo, row_hi, ink, label);
        }
    }
}

fn draw_blob(
    canvas: &mut Canvas,
    spec: &PageSpec,
    rng: &mut SplitMix64,
    band_top: i64,
    row_lo: i64,
    row_hi: i64,
    label: u32,
) {
    let (size_lo, size_hi) = spec.blob_size_range;
    let bw = rng
        .next_range(size_lo as u64, size_hi as u64)
        .min(spec.width as u64) as u32;
    let bh = rng
        .next_range(size_lo as u64, size_hi as u64)
        .min(spec.line_height as u64) as u32;
    let x = rng.next_below((spec.width - bw + 1) as u64) as i64;
    let top_nominal = band_top + rng.next_below((spec.line_height - bh + 1) as u64) as i64;
    let top = top_nominal + rng.next_signed(spec.jitter as u64);
    let ink = rng.next_range(
        spec.ink_intensity_range.0 as u64,
        spec.ink_intensity_range.1 as u64,
    ) as u8;

    if rng.next_below(2) == 0 {
        draw_ellipse(canvas, x, top, bw, bh, row_lo, row_hi, ink, label);
    } else {
        draw_stroke(canvas, rng, x, top, bw, bh, row_lo, row_hi, ink, label);
    }
}

/// Filled axis-aligned ellipse inscribed in the `bw x bh` box at (x, top).
#[allow(clippy::too_many_arguments)]
fn draw_ellipse(
    canvas: &mut Canvas,
    x: i64,
    top: i64,
    bw: u32,
    bh: u32,
    row_lo: i64,
    row_hi: i64,
    ink: u8,
    label: u32,
) {
    let rx = (bw as f64 - 1.0) / 2.0;
    let ry = (bh as f64 - 1.0) / 2.0;
    for dy in 0..bh as i64 {
        let rel = if ry > 0.0 { (dy as f64 - ry) / ry } else { 0.0 };
        let span = rx * (1.0 - rel * rel).max(0.0).sqrt();
        let lo = (rx - span).ceil() as i64;
        let hi = (rx + span).floor() as i64;
        for dx in lo..=hi {
            canvas.paint(x + dx, top + dy, row_lo, row_hi, ink, label);
        }
    }
}

/// Diagonal stroke across the blob box, 2-3 px thick. Integer arithmetic
/// only, so rasterization is identical everywhere.
#[allow(clippy::too_many_arguments)]
fn draw_stroke(
    canvas: &mut Canvas,
    rng: &mut SplitMix64,
    x: i64,
    top: i64,
    bw: u32,
    bh: u32,
    row_lo: i64,
    row_hi: i64,
    ink: u8,
    label: u32,
) {
    let thickness = rng.next_range(2, 3) as i64;
    let downward = rng.next_below(2) == 0;
    let run = bw.max(1) as i64;
    let rise = bh.saturating_sub(1) as i64;
    for i in 0..run {
        let dy = if run > 1 { i * rise / (run - 1) } else { 0 };
        let y = if downward { top + dy } else { top + rise - dy };
        for t in 0..thickness {
            canvas.paint(x + i, y + t, row_lo, row_hi, ink, label);
        }
    }
}

fn tight_boxes(labels: &[u32], width: u32, line_count: u32) -> Result<Vec<BBox>> {
    let mut boxes: Vec<Option<BBox>> = vec![None; line_count as usize];
    for (idx, &label) in labels.iter().enumerate() {
        if label == 0 {
            continue;
        }
        let x = idx as u32 % width;
        let y = idx as u32 / width;
        let slot = &mut boxes[label as usize - 1];
        match slot {
            Some(b) => {
                b.x_min = b.x_min.min(x);
                b.x_max = b.x_max.max(x);
                b.y_min = b.y_min.min(y);
                b.y_max = b.y_max.max(y);
            }
            None => {
                *slot = Some(BBox {
                    x_min: x,
                    y_min: y,
                    x_max: x,
                    y_max: y,
                })
            }
        }
    }
    boxes
        .into_iter()
        .enumerate()
        .map(|(k, b)| {
            b.ok_or_else(|| Error::InvalidParameter(format!("generated line {} has no ink", k + 1)))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Corpus specs and presets
// ---------------------------------------------------------------------------

/// A family of pages: per-page specs are derived deterministically from the
/// base seed, with the line count drawn from `[lines_min, lines_max]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub pages: u32,
    pub base_seed: u64,
    pub width: u32,
    pub height: u32,
    pub lines_min: u32,
    pub lines_max: u32,
    pub line_height: u32,
    pub line_gap: u32,
    pub jitter: u32,
    pub blob_count_per_line: u32,
    pub blob_size_range: (u32, u32),
    pub ink_intensity_range: (u8, u8),
    pub background_intensity: u8,
}

impl Default for CorpusSpec {
    /// Dense handwriting-like pages at A4 150 dpi. Blob density is chosen so
    /// a line's strip carries roughly half ink, well clear of the 30%
    /// post-filter boundary.
    fn default() -> Self {
        Self {
            pages: 10,
            base_seed: 1,
            width: 1240,
            height: 1754,
            lines_min: 5,
            lines_max: 15,
            line_height: 48,
            line_gap: 48,
            jitter: 6,
            blob_count_per_line: 110,
            blob_size_range: (28, 48),
            ink_intensity_range: (0, 90),
            background_intensity: 255,
        }
    }
}

impl CorpusSpec {
    /// Named corpus presets, including the difficult layouts: sprawling
    /// horizontal whitespace and nearly empty pages.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "wide-gaps" => Some(Self {
                lines_min: 3,
                lines_max: 6,
                line_gap: 160,
                blob_count_per_line: 12,
                blob_size_range: (16, 40),
                ..Self::default()
            }),
            "sparse-short-lines" => Some(Self {
                lines_min: 3,
                lines_max: 3,
                line_gap: 120,
                blob_count_per_line: 8,
                blob_size_range: (16, 32),
                ..Self::default()
            }),
            "a4-300dpi" => Some(Self {
                width: 2480,
                height: 3508,
                lines_min: 10,
                lines_max: 10,
                line_height: 96,
                line_gap: 96,
                jitter: 10,
                blob_count_per_line: 140,
                blob_size_range: (48, 96),
                ..Self::default()
            }),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["default", "wide-gaps", "sparse-short-lines", "a4-300dpi"]
    }

    pub fn validate(&self) -> Result<()> {
        if self.pages == 0 {
            return Err(Error::InvalidParameter("pages must be positive".into()));
        }
        if self.lines_min > self.lines_max {
            return Err(Error::InvalidParameter(format!(
                "lines_min {} exceeds lines_max {}",
                self.lines_min, self.lines_max
            )));
        }
        // The widest page the range can produce must fit.
        self.page_spec_with_lines(0, self.lines_max).validate()
    }

    /// Deterministic spec for page `index`; the page seed and line count
    /// derive from the base seed through independent SplitMix64 streams.
    pub fn page_spec(&self, index: u32) -> PageSpec {
        let mut meta = SplitMix64::new(SplitMix64::stream_seed(self.base_seed, index as u64));
        let line_count = meta.next_range(self.lines_min as u64, self.lines_max as u64) as u32;
        let rng_seed = meta.next_u64();
        PageSpec {
            width: self.width,
            height: self.height,
            line_count,
            line_height: self.line_height,
            line_gap: self.line_gap,
            jitter: self.jitter,
            blob_count_per_line: self.blob_count_per_line,
            blob_size_range: self.blob_size_range,
            ink_intensity_range: self.ink_intensity_range,
            background_intensity: self.background_intensity,
            rng_seed,
        }
    }

    fn page_spec_with_lines(&self, index: u32, line_count: u32) -> PageSpec {
        let mut spec = self.page_spec(index);
        spec.line_count = line_count;
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> PageSpec {
        PageSpec {
            width: 300,
            height: 400,
            line_count: 4,
            line_height: 30,
            line_gap: 40,
            jitter: 4,
            blob_count_per_line: 20,
            blob_size_range: (10, 24),
            ink_intensity_range: (0, 80),
            background_intensity: 255,
            rng_seed: 77,
        }
    }

    #[test]
    fn zero_lines_is_a_blank_page() {
        let spec = PageSpec {
            line_count: 0,
            ..small_spec()
        };
        let (img, gt) = generate(&spec).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 255));
        assert_eq!(gt.line_count, 0);
        assert!(gt.line_bboxes.is_empty());
    }

    #[test]
    fn same_spec_same_bits() {
        let spec = small_spec();
        let (img_a, gt_a) = generate(&spec).unwrap();
        let (img_b, gt_b) = generate(&spec).unwrap();
        assert_eq!(img_a, img_b);
        assert_eq!(gt_a, gt_b);
    }

    #[test]
    fn every_ink_pixel_is_labeled_once() {
        let spec = small_spec();
        let (img, gt) = generate(&spec).unwrap();
        for (idx, &p) in img.pixels().iter().enumerate() {
            let label = gt.label_map.as_slice()[idx];
            if p != spec.background_intensity {
                assert!(label >= 1 && label <= spec.line_count);
            } else {
                assert_eq!(label, 0);
            }
        }
    }

    #[test]
    fn zero_jitter_bands_have_exact_height() {
        let spec = PageSpec {
            jitter: 0,
            ..small_spec()
        };
        let (_, gt) = generate(&spec).unwrap();
        assert_eq!(gt.line_bboxes.len(), 4);
        for b in &gt.line_bboxes {
            assert_eq!(b.height(), spec.line_height);
        }
    }

    #[test]
    fn infeasible_band_layout_is_rejected() {
        let spec = PageSpec {
            line_count: 20,
            ..small_spec()
        };
        let err = generate(&spec).unwrap_err();
        assert!(err.to_string().contains("must fit"));
    }

    #[test]
    fn ink_lighter_than_paper_is_rejected() {
        let spec = PageSpec {
            ink_intensity_range: (0, 255),
            ..small_spec()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn differing_seeds_differ() {
        let mut differing = 0;
        for pair in 0..100u64 {
            let a = generate(&PageSpec {
                rng_seed: 2 * pair,
                ..small_spec()
            })
            .unwrap()
            .0;
            let b = generate(&PageSpec {
                rng_seed: 2 * pair + 1,
                ..small_spec()
            })
            .unwrap()
            .0;
            if a != b {
                differing += 1;
            }
        }
        assert!(differing >= 99, "only {differing}/100 seed pairs differed");
    }

    #[test]
    fn presets_are_valid_and_known() {
        for name in CorpusSpec::preset_names() {
            let spec = CorpusSpec::preset(name).unwrap();
            spec.validate().unwrap();
            // Each preset must render its first page cleanly.
            generate(&spec.page_spec(0)).unwrap();
        }
        assert!(CorpusSpec::preset("curved").is_none());
    }

    #[test]
    fn corpus_line_counts_stay_in_range() {
        let spec = CorpusSpec {
            pages: 30,
            ..CorpusSpec::default()
        };
        for i in 0..spec.pages {
            let page = spec.page_spec(i);
            assert!((5..=15).contains(&page.line_count));
        }
    }

    #[test]
    fn label_gray_round_trips_region_ids() {
        let spec = small_spec();
        let (_, gt) = generate(&spec).unwrap();
        let gray = gt.to_label_gray().unwrap();
        for (idx, &v) in gray.pixels().iter().enumerate() {
            assert_eq!(v as u32, gt.label_map.as_slice()[idx]);
        }
    }
}
