//! Segmentation quality measurement: the match-score table between
//! ground-truth and detected regions, match classification at an acceptance
//! threshold, the weighted detection rate, and the count-based correctness
//! check.
//!
//! A match score is foreground intersection-over-union. With the accepted
//! graph drawn at threshold T:
//!
//! - `o2o` counts pairs that are each other's unique accepted partner;
//! - `o2m` counts ground-truth regions with two or more accepted detected
//!   partners;
//! - `m2o` counts detected regions with two or more accepted ground-truth
//!   partners, provided at least one of those partners is not already
//!   claimed by an o2o pair or its own o2m event.
//!
//! The m2o proviso keeps every ground-truth region in at most one category,
//! which bounds `o2o + o2m + m2o` by G and hence the detection rate by 1.

use serde::{Deserialize, Serialize};

use crate::ccl::BBox;
use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};
use crate::segmenter::SegmentationResult;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Where a region set came from; ground-truth regions must be disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionSource {
    GroundTruth,
    Detected,
}

/// One labeled region as a set of foreground pixel coordinates, stored as
/// sorted flat indices (`y * width + x`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: u32,
    pixels: Vec<u32>,
}

impl Region {
    pub fn new(id: u32, mut pixels: Vec<u32>) -> Self {
        pixels.sort_unstable();
        pixels.dedup();
        Self { id, pixels }
    }

    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// A set of regions over one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSet {
    pub source: RegionSource,
    width: u32,
    height: u32,
    regions: Vec<Region>,
}

impl RegionSet {
    pub fn new(
        source: RegionSource,
        width: u32,
        height: u32,
        regions: Vec<Region>,
    ) -> Result<Self> {
        let n = width as u64 * height as u64;
        for r in &regions {
            if let Some(&p) = r.pixels.last() {
                if u64::from(p) >= n {
                    return Err(Error::ContractViolation(format!(
                        "region {} has pixel index {p} outside {width}x{height}",
                        r.id
                    )));
                }
            }
        }
        let set = Self {
            source,
            width,
            height,
            regions,
        };
        if source == RegionSource::GroundTruth && set.overlap_pixels() > 0 {
            return Err(Error::MalformedGroundTruth(
                "ground-truth regions overlap".into(),
            ));
        }
        Ok(set)
    }

    /// Regions keyed by the non-zero values of a label raster.
    pub fn from_labels(
        source: RegionSource,
        width: u32,
        height: u32,
        labels: &[u32],
    ) -> Result<Self> {
        if labels.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "label buffer length {} does not match {width}x{height}",
                labels.len()
            )));
        }
        let mut by_label: Vec<(u32, Vec<u32>)> = Vec::new();
        let mut slot_of: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
        for (idx, &label) in labels.iter().enumerate() {
            if label == 0 {
                continue;
            }
            let slot = *slot_of.entry(label).or_insert_with(|| {
                by_label.push((label, Vec::new()));
                by_label.len() - 1
            });
            by_label[slot].1.push(idx as u32);
        }
        by_label.sort_by_key(|(label, _)| *label);
        let regions = by_label
            .into_iter()
            .map(|(label, pixels)| Region::new(label, pixels))
            .collect();
        Self::new(source, width, height, regions)
    }

    /// A label-map PGM: pixel value k in 1..=255 assigns the pixel to region k.
    pub fn from_label_pgm(source: RegionSource, img: &GrayImage) -> Result<Self> {
        let labels: Vec<u32> = img.pixels().iter().map(|&p| p as u32).collect();
        Self::from_labels(source, img.width(), img.height(), &labels)
    }

    /// Rectangle regions, optionally restricted to foreground pixels of a mask.
    ///
    /// With a mask, a region is the rectangle's foreground pixels; without
    /// one, the raw rectangle. Empty regions are kept so region counts match
    /// the caller's list.
    pub fn from_rects(
        source: RegionSource,
        width: u32,
        height: u32,
        rects: &[BBox],
        mask: Option<&BinaryMask>,
    ) -> Result<Self> {
        if let Some(m) = mask {
            if m.width() != width || m.height() != height {
                return Err(Error::ContractViolation(format!(
                    "mask {}x{} does not match region space {width}x{height}",
                    m.width(),
                    m.height()
                )));
            }
        }
        let mut regions = Vec::with_capacity(rects.len());
        for (i, rect) in rects.iter().enumerate() {
            if rect.x_max >= width || rect.y_max >= height {
                return Err(Error::ContractViolation(format!(
                    "rect ({}, {}, {}, {}) outside {width}x{height}",
                    rect.x_min, rect.y_min, rect.x_max, rect.y_max
                )));
            }
            let mut pixels = Vec::new();
            for y in rect.y_min..=rect.y_max {
                for x in rect.x_min..=rect.x_max {
                    if mask.is_none_or(|m| m.is_foreground(x, y)) {
                        pixels.push(y * width + x);
                    }
                }
            }
            regions.push(Region::new(i as u32 + 1, pixels));
        }
        Self::new(source, width, height, regions)
    }

    /// Detected regions of a segmentation result: strip rectangles
    /// intersected with the binarized mask.
    pub fn from_segmentation(result: &SegmentationResult, mask: &BinaryMask) -> Result<Self> {
        let strips: Vec<BBox> = result.lines.iter().map(|l| l.strip).collect();
        Self::from_rects(
            RegionSource::Detected,
            mask.width(),
            mask.height(),
            &strips,
            Some(mask),
        )
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of pixels claimed by more than one region. Zero for valid
    /// ground truth; detected sets may legitimately report a positive count.
    pub fn overlap_pixels(&self) -> u64 {
        let total: u64 = self.regions.iter().map(|r| r.len() as u64).sum();
        let mut all: Vec<u32> = Vec::with_capacity(total as usize);
        for r in &self.regions {
            all.extend_from_slice(&r.pixels);
        }
        all.sort_unstable();
        all.dedup();
        total - all.len() as u64
    }
}

/// G x F table of match scores; entry `(j, i)` scores ground-truth region j
/// against detected region i.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchTable {
    scores: Vec<Vec<f64>>,
}

impl MatchTable {
    pub fn new(scores: Vec<Vec<f64>>) -> Self {
        Self { scores }
    }

    pub fn ground_truth_count(&self) -> usize {
        self.scores.len()
    }

    pub fn detected_count(&self) -> usize {
        self.scores.first().map_or(0, |row| row.len())
    }

    pub fn score(&self, gt: usize, det: usize) -> f64 {
        self.scores[gt][det]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.scores
    }

    /// Score every ground-truth/detected pair.
    pub fn build(truth: &RegionSet, detected: &RegionSet) -> MatchTable {
        #[cfg(feature = "parallel")]
        let scores = truth
            .regions()
            .par_iter()
            .map(|g| {
                detected
                    .regions()
                    .iter()
                    .map(|d| match_score(g.pixels(), d.pixels()))
                    .collect()
            })
            .collect();
        #[cfg(not(feature = "parallel"))]
        let scores = truth
            .regions()
            .iter()
            .map(|g| {
                detected
                    .regions()
                    .iter()
                    .map(|d| match_score(g.pixels(), d.pixels()))
                    .collect()
            })
            .collect();
        MatchTable::new(scores)
    }
}

/// Intersection-over-union of two sorted pixel-index sets; 0 when both empty.
pub fn match_score(gt: &[u32], det: &[u32]) -> f64 {
    if gt.is_empty() && det.is_empty() {
        return 0.0;
    }
    let mut inter = 0u64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < gt.len() && j < det.len() {
        match gt[i].cmp(&det[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = gt.len() as u64 + det.len() as u64 - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Match category counts at an acceptance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub o2o: u32,
    pub o2m: u32,
    pub m2o: u32,
}

/// Classify matches in the accepted graph drawn at `threshold`.
///
/// An edge joins ground-truth j and detected i iff their score is at or
/// above the threshold. See the module docs for the category definitions.
pub fn classify_matches(table: &MatchTable, threshold: f64) -> MatchCounts {
    let g_count = table.ground_truth_count();
    let f_count = table.detected_count();
    let mut gt_degree = vec![0u32; g_count];
    let mut det_degree = vec![0u32; f_count];
    for (j, row) in table.rows().iter().enumerate() {
        for (i, &score) in row.iter().enumerate() {
            if score >= threshold {
                gt_degree[j] += 1;
                det_degree[i] += 1;
            }
        }
    }

    let mut counts = MatchCounts {
        o2m: gt_degree.iter().filter(|&&d| d >= 2).count() as u32,
        ..MatchCounts::default()
    };
    for (i, &degree) in det_degree.iter().enumerate() {
        if degree == 0 {
            continue;
        }
        let partners: Vec<usize> = (0..g_count)
            .filter(|&j| table.score(j, i) >= threshold)
            .collect();
        if degree == 1 {
            if gt_degree[partners[0]] == 1 {
                counts.o2o += 1;
            }
        } else if partners.iter().any(|&j| gt_degree[j] == 1) {
            // At least one partner is not claimed elsewhere, so this event
            // still consumes a ground-truth region of its own.
            counts.m2o += 1;
        }
    }
    counts
}

/// Weighted detection rate `(w1*o2o + w2*o2m + w3*m2o) / G`.
pub fn detection_rate(counts: MatchCounts, g: u32, weights: (f64, f64, f64)) -> Result<f64> {
    if g == 0 {
        return Err(Error::InvalidParameter(
            "detection rate undefined for zero ground-truth regions".into(),
        ));
    }
    let (w1, w2, w3) = weights;
    Ok((w1 * counts.o2o as f64 + w2 * counts.o2m as f64 + w3 * counts.m2o as f64) / g as f64)
}

/// Count-based correctness: the page is right iff the number of accepted
/// lines equals the ground-truth line count.
pub fn count_accuracy(result: &SegmentationResult, gt_line_count: usize) -> bool {
    result.lines.len() == gt_line_count
}

/// Full evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub ground_truth_regions: u32,
    pub detected_regions: u32,
    pub o2o: u32,
    pub o2m: u32,
    pub m2o: u32,
    pub detection_rate: f64,
    pub threshold: f64,
    pub weights: (f64, f64, f64),
    /// Detected-side duals, informational: one-detected-to-many-ground-truth
    /// and many-detected-to-one-ground-truth under the mirrored rule.
    pub detected_o2m: u32,
    pub detected_m2o: u32,
    /// Full score table, only populated on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<Vec<f64>>>,
}

impl MatchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn transpose(table: &MatchTable) -> MatchTable {
    let g = table.ground_truth_count();
    let f = table.detected_count();
    let mut scores = vec![vec![0.0; g]; f];
    for (j, row) in table.rows().iter().enumerate() {
        for (i, &s) in row.iter().enumerate() {
            scores[i][j] = s;
        }
    }
    MatchTable::new(scores)
}

/// Score, classify, and rate a detected region set against ground truth.
pub fn evaluate(
    detected: &RegionSet,
    truth: &RegionSet,
    threshold: f64,
    weights: (f64, f64, f64),
) -> Result<MatchReport> {
    if detected.width() != truth.width() || detected.height() != truth.height() {
        return Err(Error::ContractViolation(format!(
            "detected {}x{} and truth {}x{} cover different spaces",
            detected.width(),
            detected.height(),
            truth.width(),
            truth.height()
        )));
    }
    let table = MatchTable::build(truth, detected);
    let counts = classify_matches(&table, threshold);
    let duals = classify_matches(&transpose(&table), threshold);
    let g = truth.len() as u32;
    let dr = if g == 0 {
        0.0
    } else {
        detection_rate(counts, g, weights)?
    };
    Ok(MatchReport {
        ground_truth_regions: g,
        detected_regions: detected.len() as u32,
        o2o: counts.o2o,
        o2m: counts.o2m,
        m2o: counts.m2o,
        detection_rate: dr,
        threshold,
        weights,
        detected_o2m: duals.o2m,
        detected_m2o: duals.m2o,
        scores: None,
    })
}

/// JSON ground-truth format: line count plus one bbox per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub line_count: u32,
    pub lines: Vec<GroundTruthLine>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruthLine {
    pub bbox: [u32; 4],
}

impl GroundTruthFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let gt: GroundTruthFile = serde_json::from_str(text)
            .map_err(|e| Error::MalformedGroundTruth(format!("ground-truth json: {e}")))?;
        if gt.lines.len() != gt.line_count as usize {
            return Err(Error::MalformedGroundTruth(format!(
                "line_count {} does not match {} line entries",
                gt.line_count,
                gt.lines.len()
            )));
        }
        Ok(gt)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serializes");
        s.push('\n');
        s
    }

    pub fn bboxes(&self) -> Result<Vec<BBox>> {
        self.lines
            .iter()
            .map(|l| {
                let a = l.bbox;
                if a[0] > a[2] || a[1] > a[3] {
                    return Err(Error::MalformedGroundTruth(format!(
                        "degenerate bbox [{}, {}, {}, {}]",
                        a[0], a[1], a[2], a[3]
                    )));
                }
                Ok(BBox {
                    x_min: a[0],
                    y_min: a[1],
                    x_max: a[2],
                    y_max: a[3],
                })
            })
            .collect()
    }
}
