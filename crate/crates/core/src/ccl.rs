//! 8-connectivity connected-component labeling and the two region features
//! the rest of the pipeline needs: area and bounding box.
//!
//! Labeling is a classic two-pass scan over the mask. The first pass assigns
//! provisional labels and merges them through a union-find whenever two
//! labels meet across an 8-neighbor edge; the second pass resolves roots and
//! renumbers them 1..K in raster-scan order of first encounter, so the output
//! is deterministic for a given mask.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

/// Per-pixel component ids; 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width as usize * height as usize {
            return Err(Error::InvalidParameter(format!(
                "label buffer length {} does not match {width}x{height}",
                labels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Debug rendering: label k maps to intensity `(k mod 255) + 1`, background 0.
    pub fn to_debug_gray(&self) -> GrayImage {
        let data = self
            .labels
            .iter()
            .map(|&k| if k == 0 { 0 } else { (k % 255 + 1) as u8 })
            .collect();
        GrayImage::new(self.width, self.height, data).expect("label map dimensions are valid")
    }
}

/// Inclusive axis-aligned bounding box, 0-based pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BBox {
    pub fn width(&self) -> u32 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min + 1
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            x_min: self.x_min.min(other.x_min),
            y_min: self.y_min.min(other.y_min),
            x_max: self.x_max.max(other.x_max),
            y_max: self.y_max.max(other.y_max),
        }
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// One connected blob: id, pixel count, and tight bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: u32,
    pub area: u32,
    pub bbox: BBox,
}

impl Component {
    /// Vertical reference coordinate used for line alignment.
    pub fn center_y(&self) -> f64 {
        (self.bbox.y_min + self.bbox.y_max) as f64 / 2.0
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // Slot 0 is the background sentinel.
        Self { parent: vec![0] }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            self.parent[i as usize] = self.parent[self.parent[i as usize] as usize];
            i = self.parent[i as usize];
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Lower provisional label wins, keeping first-encounter order stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Label all 8-connected foreground components.
///
/// Ids are assigned 1..K in raster-scan order of each component's first
/// encountered pixel; the returned components are sorted by id.
pub fn label_components(mask: &BinaryMask) -> (LabelMap, Vec<Component>) {
    let width = mask.width() as usize;
    let height = mask.height() as usize;
    let fg = mask.as_slice();

    let mut provisional = vec![0u32; width * height];
    let mut uf = UnionFind::new();

    for y in 0..height {
        for x in 0..width {
            let idx = y * width + x;
            if !fg[idx] {
                continue;
            }
            // Neighbors already scanned under raster order: W, NW, N, NE.
            let mut label = 0u32;
            let merge = |cand: u32, uf: &mut UnionFind, label: &mut u32| {
                if cand != 0 {
                    if *label == 0 {
                        *label = cand;
                    } else if cand != *label {
                        uf.union(cand, *label);
                    }
                }
            };
            if x > 0 {
                merge(provisional[idx - 1], &mut uf, &mut label);
            }
            if y > 0 {
                let up = idx - width;
                if x > 0 {
                    merge(provisional[up - 1], &mut uf, &mut label);
                }
                merge(provisional[up], &mut uf, &mut label);
                if x + 1 < width {
                    merge(provisional[up + 1], &mut uf, &mut label);
                }
            }
            if label == 0 {
                label = uf.make_set();
            }
            provisional[idx] = label;
        }
    }

    // Second pass: resolve roots, renumber in first-encounter order, and
    // accumulate area + bbox in the same sweep.
    let mut root_to_final = vec![0u32; uf.parent.len()];
    let mut components: Vec<Component> = Vec::new();
    let mut labels = vec![0u32; width * height];

    for y in 0..height {
        for x in 0..width {
            let idx = y * width + x;
            let p = provisional[idx];
            if p == 0 {
                continue;
            }
            let root = uf.find(p);
            let mut final_id = root_to_final[root as usize];
            if final_id == 0 {
                final_id = components.len() as u32 + 1;
                root_to_final[root as usize] = final_id;
                components.push(Component {
                    id: final_id,
                    area: 0,
                    bbox: BBox {
                        x_min: x as u32,
                        y_min: y as u32,
                        x_max: x as u32,
                        y_max: y as u32,
                    },
                });
            }
            let comp = &mut components[final_id as usize - 1];
            comp.area += 1;
            let (x, y) = (x as u32, y as u32);
            comp.bbox.x_min = comp.bbox.x_min.min(x);
            comp.bbox.x_max = comp.bbox.x_max.max(x);
            comp.bbox.y_min = comp.bbox.y_min.min(y);
            comp.bbox.y_max = comp.bbox.y_max.max(y);
            labels[idx] = final_id;
        }
    }

    let map =
        LabelMap::new(mask.width(), mask.height(), labels).expect("mask dimensions are valid");
    (map, components)
}

/// Keep components whose area lies in `[a_min, a_max]`; `None` means unbounded.
pub fn filter_by_area(
    components: &[Component],
    a_min: u32,
    a_max: Option<u32>,
) -> Result<Vec<Component>> {
    if let Some(hi) = a_max {
        if a_min > hi {
            return Err(Error::InvalidParameter(format!(
                "area_min {a_min} exceeds area_max {hi}"
            )));
        }
    }
    Ok(components
        .iter()
        .filter(|c| c.area >= a_min && a_max.is_none_or(|hi| c.area <= hi))
        .cloned()
        .collect())
}
