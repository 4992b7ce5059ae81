#![allow(dead_code)]

//! Independent oracles shared by the property and acceptance suites. These
//! deliberately avoid the library's algorithms: labeling is checked against a
//! breadth-first flood fill, match classification against a straight-line
//! re-derivation from explicit adjacency lists.

use std::collections::{HashSet, VecDeque};

use lineseg_core::raster::BinaryMask;
use lineseg_core::rng::SplitMix64;

/// Partition of foreground pixels into 8-connected components, one sorted
/// flat-index list per component, components in discovery (raster) order.
pub fn flood_fill_partition(mask: &BinaryMask) -> Vec<Vec<u32>> {
    let width = mask.width() as i64;
    let height = mask.height() as i64;
    let mut seen = vec![false; (width * height) as usize];
    let mut partition = Vec::new();

    for start_y in 0..height {
        for start_x in 0..width {
            let start_idx = (start_y * width + start_x) as usize;
            if seen[start_idx] || !mask.is_foreground(start_x as u32, start_y as u32) {
                continue;
            }
            let mut group = Vec::new();
            let mut queue = VecDeque::new();
            seen[start_idx] = true;
            queue.push_back((start_x, start_y));
            while let Some((x, y)) = queue.pop_front() {
                group.push((y * width + x) as u32);
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= width || ny >= height {
                            continue;
                        }
                        let nidx = (ny * width + nx) as usize;
                        if !seen[nidx] && mask.is_foreground(nx as u32, ny as u32) {
                            seen[nidx] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            group.sort_unstable();
            partition.push(group);
        }
    }
    partition
}

/// Normalize a label raster into the same shape as `flood_fill_partition`,
/// ordered by each group's smallest pixel index so partitions compare even
/// if label numbering differs.
pub fn partition_from_labels(labels: &[u32]) -> Vec<Vec<u32>> {
    let max_label = labels.iter().copied().max().unwrap_or(0) as usize;
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); max_label];
    for (idx, &label) in labels.iter().enumerate() {
        if label > 0 {
            groups[label as usize - 1].push(idx as u32);
        }
    }
    groups.retain(|g| !g.is_empty());
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

/// Seeded random mask with roughly `fill_percent` foreground.
pub fn random_mask(rng: &mut SplitMix64, width: u32, height: u32, fill_percent: u32) -> BinaryMask {
    let fg = (0..width as usize * height as usize)
        .map(|_| rng.next_below(100) < fill_percent as u64)
        .collect();
    BinaryMask::new(width, height, fg).unwrap()
}

/// Brute-force match classification from explicit adjacency lists.
///
/// o2o: edges whose two endpoints have no other accepted partner.
/// o2m: ground-truth regions with two or more accepted partners.
/// m2o: detected regions with two or more accepted partners, at least one of
/// which is not otherwise claimed (degree one).
pub fn brute_force_classify(scores: &[Vec<f64>], threshold: f64) -> (u32, u32, u32) {
    let g_count = scores.len();
    let f_count = scores.first().map_or(0, |r| r.len());

    let mut gt_partners: Vec<HashSet<usize>> = vec![HashSet::new(); g_count];
    let mut det_partners: Vec<HashSet<usize>> = vec![HashSet::new(); f_count];
    for (j, row) in scores.iter().enumerate() {
        for (i, &s) in row.iter().enumerate() {
            if s >= threshold {
                gt_partners[j].insert(i);
                det_partners[i].insert(j);
            }
        }
    }

    let o2o = (0..g_count)
        .filter(|&j| {
            gt_partners[j].len() == 1
                && det_partners[*gt_partners[j].iter().next().unwrap()].len() == 1
        })
        .count() as u32;
    let o2m = (0..g_count).filter(|&j| gt_partners[j].len() >= 2).count() as u32;
    let m2o = (0..f_count)
        .filter(|&i| {
            det_partners[i].len() >= 2 && det_partners[i].iter().any(|&j| gt_partners[j].len() == 1)
        })
        .count() as u32;
    (o2o, o2m, m2o)
}
