//! The line segmentation pipeline: dynamic text-height estimation, vertical
//! coordinate-alignment clustering of components, height validation with one
//! split pass for merged clusters, and the ink-density post-filter.
//!
//! Components whose bounding-box vertical centers chain within the alignment
//! tolerance form one line candidate. A candidate survives if its strip
//! height sits inside `[min_factor, max_factor] * text_height` and the ink
//! inside its strip covers at least `min_ink_fraction` of the strip area.

use serde::{Deserialize, Serialize};

use crate::ccl::{self, BBox, Component};
use crate::error::{Error, Result};
use crate::raster::{self, BinaryMask, GrayImage};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Pipeline parameters. Defaults are the constants the method prescribes:
/// 15 px alignment tolerance, 30% ink fraction, height window 0.5x-3x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegParams {
    pub alignment_tolerance: u32,
    pub area_min: u32,
    pub area_max: Option<u32>,
    pub min_height_factor: f64,
    pub max_height_factor: f64,
    pub min_ink_fraction: f64,
}

impl Default for SegParams {
    fn default() -> Self {
        Self {
            alignment_tolerance: 15,
            area_min: 15,
            area_max: None,
            min_height_factor: 0.5,
            max_height_factor: 3.0,
            min_ink_fraction: 0.30,
        }
    }
}

impl SegParams {
    pub fn validate(&self) -> Result<()> {
        if self.alignment_tolerance < 1 {
            return Err(Error::InvalidParameter(
                "alignment_tolerance must be at least 1".into(),
            ));
        }
        if self.area_min < 1 {
            return Err(Error::InvalidParameter(
                "area_min must be at least 1".into(),
            ));
        }
        if let Some(hi) = self.area_max {
            if self.area_min > hi {
                return Err(Error::InvalidParameter(format!(
                    "area_min {} exceeds area_max {hi}",
                    self.area_min
                )));
            }
        }
        if self.min_height_factor.is_nan() || self.min_height_factor <= 0.0 {
            return Err(Error::InvalidParameter(
                "min_height_factor must be positive".into(),
            ));
        }
        if self.max_height_factor < self.min_height_factor {
            return Err(Error::InvalidParameter(format!(
                "max_height_factor {} below min_height_factor {}",
                self.max_height_factor, self.min_height_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.min_ink_fraction) {
            return Err(Error::InvalidParameter(
                "min_ink_fraction must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// A cluster of vertically aligned components on its way to becoming a line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCandidate {
    pub member_ids: Vec<u32>,
    /// Union of member bounding boxes.
    pub strip: BBox,
    /// Foreground pixels inside the strip over strip area; filled by the
    /// post-filter, `None` before it runs.
    pub ink_fraction: Option<f64>,
}

impl LineCandidate {
    fn from_members(members: &[Component]) -> Self {
        let strip = members
            .iter()
            .skip(1)
            .fold(members[0].bbox, |acc, c| acc.union(&c.bbox));
        let mut member_ids: Vec<u32> = members.iter().map(|c| c.id).collect();
        member_ids.sort_unstable();
        Self {
            member_ids,
            strip,
            ink_fraction: None,
        }
    }
}

/// Why a candidate was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscardReason {
    #[serde(rename = "below height range")]
    BelowHeightRange,
    #[serde(rename = "above height range")]
    AboveHeightRange,
    #[serde(rename = "ink fraction below threshold")]
    InkFractionBelowThreshold,
}

impl std::fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DiscardReason::BelowHeightRange => "below height range",
            DiscardReason::AboveHeightRange => "above height range",
            DiscardReason::InkFractionBelowThreshold => "ink fraction below threshold",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscardedCandidate {
    pub candidate: LineCandidate,
    pub reason: DiscardReason,
}

/// One segmented line, ordered top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct TextLine {
    pub index: u32,
    pub strip: BBox,
    pub member_ids: Vec<u32>,
}

/// Output of `segment_page`, including everything that was filtered away.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub lines: Vec<TextLine>,
    pub text_height: f64,
    pub params: SegParams,
    pub discarded: Vec<DiscardedCandidate>,
}

/// Characteristic text height from page dimensions alone:
/// `(1/24) * sqrt((width/2)^2 + height^2)`.
pub fn text_height(image_width: u32, image_height: u32) -> Result<f64> {
    if image_width == 0 && image_height == 0 {
        return Err(Error::InvalidParameter(
            "text height undefined for a 0x0 image".into(),
        ));
    }
    let half_w = image_width as f64 / 2.0;
    let h = image_height as f64;
    Ok((half_w * half_w + h * h).sqrt() / 24.0)
}

/// Single-link clustering of components on their vertical centers.
///
/// Two components chain iff their `center_y` values differ by at most
/// `tolerance`; clusters are the connected components of that relation.
/// Because the relation lives on one coordinate, sorting by center and
/// splitting at gaps larger than the tolerance yields exactly the
/// transitive closure. Clusters come back ordered by their minimum `y_min`,
/// members in id (raster) order.
pub fn align_components(components: &[Component], tolerance: u32) -> Vec<Vec<Component>> {
    if components.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<&Component> = components.iter().collect();
    sorted.sort_by(|a, b| {
        a.center_y()
            .partial_cmp(&b.center_y())
            .expect("centers are finite")
            .then(a.id.cmp(&b.id))
    });

    let tol = tolerance as f64;
    let mut clusters: Vec<Vec<Component>> = Vec::new();
    let mut current: Vec<Component> = vec![sorted[0].clone()];
    let mut prev_center = sorted[0].center_y();
    for comp in &sorted[1..] {
        let c = comp.center_y();
        if c - prev_center <= tol {
            current.push((*comp).clone());
        } else {
            clusters.push(std::mem::take(&mut current));
            current.push((*comp).clone());
        }
        prev_center = c;
    }
    clusters.push(current);

    for cluster in &mut clusters {
        cluster.sort_by_key(|c| c.id);
    }
    clusters.sort_by_key(|cluster| cluster.iter().map(|c| c.bbox.y_min).min().unwrap());
    clusters
}

/// Accept clusters whose strip height lies within the text-height window.
///
/// Clusters taller than the window get one re-clustering pass at half the
/// tolerance; the resulting pieces are validated against the same window and
/// anything still outside is discarded. Too-short clusters are discarded
/// outright.
pub fn validate_lines(
    clusters: Vec<Vec<Component>>,
    height_text: f64,
    params: &SegParams,
) -> Result<(Vec<LineCandidate>, Vec<DiscardedCandidate>)> {
    if height_text.is_nan() || height_text <= 0.0 {
        return Err(Error::InvalidParameter(
            "height_text must be positive".into(),
        ));
    }
    let lo = params.min_height_factor * height_text;
    let hi = params.max_height_factor * height_text;
    let half_tolerance = (params.alignment_tolerance / 2).max(1);

    let mut accepted = Vec::new();
    let mut discarded = Vec::new();

    let mut classify = |members: &[Component], allow_split: bool| -> Option<Vec<Vec<Component>>> {
        let candidate = LineCandidate::from_members(members);
        let h = candidate.strip.height() as f64;
        if h < lo {
            discarded.push(DiscardedCandidate {
                candidate,
                reason: DiscardReason::BelowHeightRange,
            });
            None
        } else if h <= hi {
            accepted.push(candidate);
            None
        } else if allow_split {
            Some(align_components(members, half_tolerance))
        } else {
            discarded.push(DiscardedCandidate {
                candidate,
                reason: DiscardReason::AboveHeightRange,
            });
            None
        }
    };

    for cluster in &clusters {
        if let Some(pieces) = classify(cluster, true) {
            for piece in &pieces {
                classify(piece, false);
            }
        }
    }
    Ok((accepted, discarded))
}

/// Count foreground pixels inside a strip.
fn ink_pixels(mask: &BinaryMask, strip: &BBox) -> u64 {
    let mut count = 0u64;
    for y in strip.y_min..=strip.y_max {
        for x in strip.x_min..=strip.x_max {
            if mask.is_foreground(x, y) {
                count += 1;
            }
        }
    }
    count
}

/// Drop candidates whose strips hold too little ink.
///
/// `ink_fraction = foreground pixels in strip / strip area`; a candidate is
/// kept iff `ink_fraction >= min_ink_fraction` (boundary inclusive).
pub fn postfilter(
    candidates: Vec<LineCandidate>,
    mask: &BinaryMask,
    min_ink_fraction: f64,
) -> Result<(Vec<LineCandidate>, Vec<DiscardedCandidate>)> {
    for candidate in &candidates {
        let s = &candidate.strip;
        if s.x_max >= mask.width() || s.y_max >= mask.height() {
            return Err(Error::ContractViolation(format!(
                "strip ({}, {}, {}, {}) outside mask bounds {}x{}",
                s.x_min,
                s.y_min,
                s.x_max,
                s.y_max,
                mask.width(),
                mask.height()
            )));
        }
    }

    #[cfg(feature = "parallel")]
    let fractions: Vec<f64> = candidates
        .par_iter()
        .map(|c| ink_pixels(mask, &c.strip) as f64 / c.strip.area() as f64)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let fractions: Vec<f64> = candidates
        .iter()
        .map(|c| ink_pixels(mask, &c.strip) as f64 / c.strip.area() as f64)
        .collect();

    let mut accepted = Vec::new();
    let mut discarded = Vec::new();
    for (mut candidate, fraction) in candidates.into_iter().zip(fractions) {
        candidate.ink_fraction = Some(fraction);
        if fraction >= min_ink_fraction {
            accepted.push(candidate);
        } else {
            discarded.push(DiscardedCandidate {
                candidate,
                reason: DiscardReason::InkFractionBelowThreshold,
            });
        }
    }
    Ok((accepted, discarded))
}

/// Run the whole pipeline on one page.
///
/// binarize -> label components -> area filter -> text height -> alignment
/// -> height validation -> ink post-filter -> top-to-bottom ordering.
/// A page that yields zero lines is a valid result.
pub fn segment_page(img: &GrayImage, params: &SegParams) -> Result<SegmentationResult> {
    params.validate()?;
    let mask = raster::binarize(img);
    let (_label_map, components) = ccl::label_components(&mask);
    let filtered = ccl::filter_by_area(&components, params.area_min, params.area_max)?;
    let height_text = text_height(img.width(), img.height())?;
    let clusters = align_components(&filtered, params.alignment_tolerance);
    let (candidates, mut discarded) = validate_lines(clusters, height_text, params)?;
    let (mut kept, dropped) = postfilter(candidates, &mask, params.min_ink_fraction)?;
    discarded.extend(dropped);

    kept.sort_by_key(|c| (c.strip.y_min, c.strip.x_min));
    let lines = kept
        .into_iter()
        .enumerate()
        .map(|(i, c)| TextLine {
            index: i as u32,
            strip: c.strip,
            member_ids: c.member_ids,
        })
        .collect();

    Ok(SegmentationResult {
        lines,
        text_height: height_text,
        params: params.clone(),
        discarded,
    })
}

/// Re-emit the page with line strips outlined (2 px border, mid gray).
pub fn overlay(img: &GrayImage, lines: &[TextLine]) -> GrayImage {
    const BORDER: u32 = 2;
    const INK: u8 = 128;
    let mut out = img.clone();
    for line in lines {
        let s = &line.strip;
        for t in 0..BORDER {
            let top = s.y_min.saturating_add(t).min(img.height() - 1);
            let bottom = s.y_max.saturating_sub(t);
            for x in s.x_min..=s.x_max.min(img.width() - 1) {
                out.set(x, top, INK);
                out.set(x, bottom, INK);
            }
            let left = s.x_min.saturating_add(t).min(img.width() - 1);
            let right = s.x_max.saturating_sub(t);
            for y in s.y_min..=s.y_max.min(img.height() - 1) {
                out.set(left, y, INK);
                out.set(right, y, INK);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LineRecord {
    index: u32,
    bbox: [u32; 4],
    components: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiscardRecord {
    bbox: [u32; 4],
    reason: String,
}

/// Serializable form of a segmentation result; bbox arrays are
/// `[x_min, y_min, x_max, y_max]`, 0-based inclusive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationReport {
    pub image: String,
    pub text_height: f64,
    pub params: SegParams,
    lines: Vec<LineRecord>,
    discarded: Vec<DiscardRecord>,
}

fn bbox_array(b: &BBox) -> [u32; 4] {
    [b.x_min, b.y_min, b.x_max, b.y_max]
}

fn bbox_from_array(a: [u32; 4]) -> Result<BBox> {
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
}

impl SegmentationReport {
    pub fn new(image: impl Into<String>, result: &SegmentationResult) -> Self {
        Self {
            image: image.into(),
            text_height: result.text_height,
            params: result.params.clone(),
            lines: result
                .lines
                .iter()
                .map(|l| LineRecord {
                    index: l.index,
                    bbox: bbox_array(&l.strip),
                    components: l.member_ids.clone(),
                })
                .collect(),
            discarded: result
                .discarded
                .iter()
                .map(|d| DiscardRecord {
                    bbox: bbox_array(&d.candidate.strip),
                    reason: d.reason.to_string(),
                })
                .collect(),
        }
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn line_strips(&self) -> Result<Vec<BBox>> {
        self.lines.iter().map(|l| bbox_from_array(l.bbox)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::MalformedGroundTruth(format!("segmentation report: {e}")))
    }
}
