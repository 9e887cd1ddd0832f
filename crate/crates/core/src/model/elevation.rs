//! Road-relative elevation maps and defect instance extraction/sampling.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{ModelError, Result};
use crate::math::{p2, p3, Point2, Point3};

#[allow(unused_imports)]
use num_traits::Float;

/// Regular 2D grid of road-relative heights (meters, negative = below the
/// road plane). Missing cells are stored as NaN and reported as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationMap {
    pub width: u32,
    pub height: u32,
    pub cell_size: f64,
    pub origin: Point2,
    heights: Vec<f64>,
}

impl ElevationMap {
    pub fn new(width: u32, height: u32, cell_size: f64, origin: Point2) -> Result<Self> {
        Self::from_heights(
            width,
            height,
            cell_size,
            origin,
            alloc::vec![f64::NAN; (width as usize) * (height as usize)],
        )
    }

    pub fn from_heights(
        width: u32,
        height: u32,
        cell_size: f64,
        origin: Point2,
        heights: Vec<f64>,
    ) -> Result<Self> {
        if width == 0
            || height == 0
            || cell_size <= 0.0
            || heights.len() != (width as usize) * (height as usize)
            || heights.iter().any(|h| h.is_infinite())
        {
            return Err(ModelError::BadElevationShape {
                width,
                height,
                len: heights.len(),
                cell_size,
            });
        }
        Ok(ElevationMap {
            width,
            height,
            cell_size,
            origin,
            heights,
        })
    }

    pub fn height_at(&self, col: u32, row: u32) -> Option<f64> {
        let h = self.heights[row as usize * self.width as usize + col as usize];
        if h.is_nan() {
            None
        } else {
            Some(h)
        }
    }

    pub fn set(&mut self, col: u32, row: u32, value: f64) {
        self.heights[row as usize * self.width as usize + col as usize] = value;
    }

    pub fn raw_heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn cell_center(&self, col: u32, row: u32) -> Point2 {
        p2(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    /// Cell containing a world point, if inside the grid.
    pub fn cell_of(&self, p: Point2) -> Option<(u32, u32)> {
        let c = ((p.x - self.origin.x) / self.cell_size).floor();
        let r = ((p.y - self.origin.y) / self.cell_size).floor();
        if c < 0.0 || r < 0.0 || c >= self.width as f64 || r >= self.height as f64 {
            return None;
        }
        Some((c as u32, r as u32))
    }
}

/// One 8-connected defect component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectInstance {
    /// (col, row) cells, sorted row-major.
    pub cells: Vec<(u32, u32)>,
}

impl DefectInstance {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Smallest (row, col) cell, the tie-break key for instance ordering.
    fn top_left(&self) -> (u32, u32) {
        let &(c, r) = self
            .cells
            .iter()
            .min_by_key(|&&(c, r)| (r, c))
            .expect("instances are nonempty");
        (r, c)
    }
}

/// Extracts defect instances: cells with height below `depth_threshold`
/// form 8-connected components; components covering at least `min_area`
/// square meters are returned, largest first (ties by top-left cell).
pub fn extract_defect_instances(
    emap: &ElevationMap,
    depth_threshold: f64,
    min_area: f64,
) -> Vec<DefectInstance> {
    assert!(depth_threshold < 0.0, "depth threshold must be negative");
    assert!(min_area >= 0.0, "min area must be nonnegative");
    let (w, h) = (emap.width as i64, emap.height as i64);
    let candidate = |c: i64, r: i64| -> bool {
        c >= 0
            && r >= 0
            && c < w
            && r < h
            && emap
                .height_at(c as u32, r as u32)
                .map(|z| z < depth_threshold)
                .unwrap_or(false)
    };
    let cell_area = emap.cell_size * emap.cell_size;
    let mut seen = alloc::vec![false; (w * h) as usize];
    let mut instances: Vec<DefectInstance> = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if seen[(row * w + col) as usize] || !candidate(col, row) {
                continue;
            }
            let mut cells = Vec::new();
            let mut stack = alloc::vec![(col, row)];
            seen[(row * w + col) as usize] = true;
            while let Some((c, r)) = stack.pop() {
                cells.push((c as u32, r as u32));
                for dc in -1..=1 {
                    for dr in -1..=1 {
                        if dc == 0 && dr == 0 {
                            continue;
                        }
                        let (nc, nr) = (c + dc, r + dr);
                        if candidate(nc, nr) && !seen[(nr * w + nc) as usize] {
                            seen[(nr * w + nc) as usize] = true;
                            stack.push((nc, nr));
                        }
                    }
                }
            }
            if cells.len() as f64 * cell_area >= min_area {
                cells.sort_unstable_by_key(|&(c, r)| (r, c));
                instances.push(DefectInstance { cells });
            }
        }
    }
    instances.sort_by_key(|inst| (core::cmp::Reverse(inst.cell_count()), inst.top_left()));
    instances
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLabel {
    Defect,
    /// Non-defect neighbor cell shared with the surrounding road surface.
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectSample {
    pub cell: (u32, u32),
    pub position: Point3,
    pub label: SampleLabel,
}

/// Labeled sample set covering one defect instance plus its one-cell ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDefect {
    pub samples: Vec<DefectSample>,
    pub stride: u32,
    pub cell_size: f64,
    pub origin: Point2,
    /// Instance and ring cells; the region the defect mesh may cover.
    pub region: BTreeSet<(u32, u32)>,
}

impl SampledDefect {
    pub fn ring_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.label == SampleLabel::Ring)
            .count()
    }
}

fn chebyshev(a: (u32, u32), b: (u32, u32)) -> u32 {
    let dc = (a.0 as i64 - b.0 as i64).unsigned_abs();
    let dr = (a.1 as i64 - b.1 as i64).unsigned_abs();
    dc.max(dr) as u32
}

/// Grid-samples the instance at `stride`, expands iteratively until every
/// instance cell is within `stride` (Chebyshev) of a sample, then adds the
/// one-cell ring of non-defect neighbors labeled [`SampleLabel::Ring`].
///
/// Ring heights default to 0 (the road plane) when the map has no data.
pub fn sample_defect_points(
    emap: &ElevationMap,
    instance: &DefectInstance,
    stride: u32,
) -> Result<SampledDefect> {
    if instance.cells.is_empty() {
        return Err(ModelError::EmptyInstance);
    }
    let stride = stride.max(1);
    let instance_set: BTreeSet<(u32, u32)> = instance.cells.iter().copied().collect();
    let min_col = instance.cells.iter().map(|c| c.0).min().unwrap();
    let min_row = instance.cells.iter().map(|c| c.1).min().unwrap();
    let mut chosen: Vec<(u32, u32)> = instance
        .cells
        .iter()
        .copied()
        .filter(|&(c, r)| (c - min_col) % stride == 0 && (r - min_row) % stride == 0)
        .collect();
    // Min Chebyshev distance from each instance cell to the chosen set.
    let mut dist: Vec<u32> = instance
        .cells
        .iter()
        .map(|&cell| {
            chosen
                .iter()
                .map(|&s| chebyshev(cell, s))
                .min()
                .unwrap_or(u32::MAX)
        })
        .collect();
    loop {
        // Farthest uncovered cell joins the sample set (ties row-major).
        let mut far: Option<(u32, usize)> = None;
        for (i, &d) in dist.iter().enumerate() {
            if d > stride && far.map_or(true, |(fd, _)| d > fd) {
                far = Some((d, i));
            }
        }
        let Some((_, idx)) = far else { break };
        let cell = instance.cells[idx];
        chosen.push(cell);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = (*d).min(chebyshev(instance.cells[i], cell));
        }
    }
    chosen.sort_unstable_by_key(|&(c, r)| (r, c));
    // One-cell ring: non-instance 8-neighbors inside the map.
    let mut ring: BTreeSet<(u32, u32)> = BTreeSet::new();
    for &(c, r) in &instance.cells {
        for dc in -1i64..=1 {
            for dr in -1i64..=1 {
                if dc == 0 && dr == 0 {
                    continue;
                }
                let (nc, nr) = (c as i64 + dc, r as i64 + dr);
                if nc < 0 || nr < 0 || nc >= emap.width as i64 || nr >= emap.height as i64 {
                    continue;
                }
                let ncell = (nc as u32, nr as u32);
                if !instance_set.contains(&ncell) {
                    ring.insert(ncell);
                }
            }
        }
    }
    let sample_at = |cell: (u32, u32), label: SampleLabel| -> DefectSample {
        let center = emap.cell_center(cell.0, cell.1);
        let z = emap.height_at(cell.0, cell.1).unwrap_or(0.0);
        DefectSample {
            cell,
            position: p3(center.x, center.y, z),
            label,
        }
    };
    let mut samples: Vec<DefectSample> = chosen
        .iter()
        .map(|&c| sample_at(c, SampleLabel::Defect))
        .collect();
    let mut ring_sorted: Vec<(u32, u32)> = ring.iter().copied().collect();
    ring_sorted.sort_unstable_by_key(|&(c, r)| (r, c));
    samples.extend(ring_sorted.iter().map(|&c| sample_at(c, SampleLabel::Ring)));
    let mut region = instance_set;
    region.extend(ring);
    Ok(SampledDefect {
        samples,
        stride,
        cell_size: emap.cell_size,
        origin: emap.origin,
        region,
    })
}
