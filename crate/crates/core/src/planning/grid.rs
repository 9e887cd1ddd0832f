//! Occupancy grid maps rasterized from scene polygons.

use alloc::vec::Vec;

use super::{PlanError, Result};
use crate::geometry::point_in_polygon;
use crate::math::{p2, Point2};
use crate::twin::SceneManifest;

#[allow(unused_imports)]
use num_traits::Float;

/// Default grid resolution in meters per cell.
pub const DEFAULT_RESOLUTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CellState {
    Free,
    Defect,
    OffRoad,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MapBounds {
    pub min: Point2,
    pub max: Point2,
}

impl MapBounds {
    pub fn new(min: Point2, max: Point2) -> Self {
        MapBounds { min, max }
    }

    /// Bounding box of a polygon set, padded by `margin`.
    pub fn of_polygons(polygons: &[Vec<Point2>], margin: f64) -> Option<Self> {
        let mut min = p2(f64::INFINITY, f64::INFINITY);
        let mut max = p2(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for poly in polygons {
            for p in poly {
                min = p2(min.x.min(p.x), min.y.min(p.y));
                max = p2(max.x.max(p.x), max.y.max(p.y));
            }
        }
        if min.x > max.x {
            return None;
        }
        Some(MapBounds {
            min: p2(min.x - margin, min.y - margin),
            max: p2(max.x + margin, max.y + margin),
        })
    }
}

/// 2D occupancy raster at fixed resolution.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridMap {
    pub resolution: f64,
    pub origin: Point2,
    pub width: u32,
    pub height: u32,
    cells: Vec<CellState>,
}

impl GridMap {
    pub fn new(
        resolution: f64,
        origin: Point2,
        width: u32,
        height: u32,
        cells: Vec<CellState>,
    ) -> Result<Self> {
        if resolution <= 0.0
            || width == 0
            || height == 0
            || cells.len() != (width as usize) * (height as usize)
        {
            return Err(PlanError::BadMapShape);
        }
        Ok(GridMap {
            resolution,
            origin,
            width,
            height,
            cells,
        })
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn state(&self, col: u32, row: u32) -> CellState {
        self.cells[row as usize * self.width as usize + col as usize]
    }

    pub fn cell_center(&self, col: u32, row: u32) -> Point2 {
        p2(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell containing `p`, if inside the map.
    pub fn cell_of(&self, p: Point2) -> Option<(u32, u32)> {
        let c = ((p.x - self.origin.x) / self.resolution).floor();
        let r = ((p.y - self.origin.y) / self.resolution).floor();
        if c < 0.0 || r < 0.0 || c >= self.width as f64 || r >= self.height as f64 {
            return None;
        }
        Some((c as u32, r as u32))
    }

    /// State at a world point; `OffRoad` outside the map.
    pub fn state_at(&self, p: Point2) -> CellState {
        self.cell_of(p)
            .map(|(c, r)| self.state(c, r))
            .unwrap_or(CellState::OffRoad)
    }

    /// Centers of all defect cells (row-major order).
    pub fn defect_centers(&self) -> Vec<Point2> {
        let mut out = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width {
                if self.state(c, r) == CellState::Defect {
                    out.push(self.cell_center(c, r));
                }
            }
        }
        out
    }

    pub fn diagonal(&self) -> f64 {
        let w = self.width as f64 * self.resolution;
        let h = self.height as f64 * self.resolution;
        (w * w + h * h).sqrt()
    }
}

/// Rasterizes road and defect polygons: a cell center inside any defect
/// polygon is `Defect`, inside a road polygon `Free`, otherwise `OffRoad`.
pub fn rasterize(
    roads: &[Vec<Point2>],
    defects: &[Vec<Point2>],
    bounds: MapBounds,
    resolution: f64,
) -> Result<GridMap> {
    if resolution <= 0.0 || bounds.max.x <= bounds.min.x || bounds.max.y <= bounds.min.y {
        return Err(PlanError::BadMapShape);
    }
    let width = ((bounds.max.x - bounds.min.x) / resolution).ceil() as u32;
    let height = ((bounds.max.y - bounds.min.y) / resolution).ceil() as u32;
    let mut cells = Vec::with_capacity((width as usize) * (height as usize));
    for r in 0..height {
        for c in 0..width {
            let center = p2(
                bounds.min.x + (c as f64 + 0.5) * resolution,
                bounds.min.y + (r as f64 + 0.5) * resolution,
            );
            let state = if defects.iter().any(|poly| point_in_polygon(center, poly)) {
                CellState::Defect
            } else if roads.iter().any(|poly| point_in_polygon(center, poly)) {
                CellState::Free
            } else {
                CellState::OffRoad
            };
            cells.push(state);
        }
    }
    GridMap::new(resolution, bounds.min, width, height, cells)
}

/// Rasterizes a generated scene from its manifest polygons.
pub fn rasterize_scene(
    manifest: &SceneManifest,
    resolution: f64,
    margin: f64,
) -> Result<GridMap> {
    let roads: Vec<Vec<Point2>> = manifest.segments.iter().map(|s| s.outer.clone()).collect();
    let defects: Vec<Vec<Point2>> = manifest
        .placements
        .iter()
        .map(|p| p.boundary.clone())
        .collect();
    let bounds = MapBounds::of_polygons(&roads, margin).ok_or(PlanError::BadMapShape)?;
    rasterize(&roads, &defects, bounds, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn one_square_meter_defect_at_point_two() {
        let road = alloc::vec![p2(-2.0, -2.0), p2(3.0, -2.0), p2(3.0, 3.0), p2(-2.0, 3.0)];
        let defect = alloc::vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0), p2(0.0, 1.0)];
        let grid = rasterize(
            &[road],
            &[defect],
            MapBounds::new(p2(-2.0, -2.0), p2(3.0, 3.0)),
            0.2,
        )
        .unwrap();
        let defects = grid.cells().iter().filter(|&&c| c == CellState::Defect).count();
        assert_eq!(defects, 25, "5x5 cell centers inside the unit defect");
    }

    #[test]
    fn no_defects_all_free_inside_road() {
        let road = alloc::vec![p2(0.0, 0.0), p2(4.0, 0.0), p2(4.0, 4.0), p2(0.0, 4.0)];
        let grid = rasterize(
            &[road],
            &[],
            MapBounds::new(p2(0.0, 0.0), p2(4.0, 4.0)),
            0.2,
        )
        .unwrap();
        assert!(grid.cells().iter().all(|&c| c == CellState::Free));
    }

    #[test]
    fn labels_match_point_in_polygon_oracle() {
        let mut rng = crate::rng::seeded_rng(31);
        for _ in 0..5 {
            let mut road = Vec::new();
            let n = 5 + (rng.random::<u32>() % 4) as usize;
            for k in 0..n {
                let a = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
                let r = 3.0 + 2.0 * rng.random::<f64>();
                road.push(p2(r * a.cos(), r * a.sin()));
            }
            let defect = alloc::vec![
                p2(-0.8, -0.5),
                p2(0.9, -0.7),
                p2(0.6, 0.8),
                p2(-0.5, 0.6)
            ];
            let bounds = MapBounds::new(p2(-6.0, -6.0), p2(6.0, 6.0));
            let grid = rasterize(
                core::slice::from_ref(&road),
                core::slice::from_ref(&defect),
                bounds,
                0.25,
            )
            .unwrap();
            for r in 0..grid.height {
                for c in 0..grid.width {
                    let center = grid.cell_center(c, r);
                    let want = if point_in_polygon(center, &defect) {
                        CellState::Defect
                    } else if point_in_polygon(center, &road) {
                        CellState::Free
                    } else {
                        CellState::OffRoad
                    };
                    assert_eq!(grid.state(c, r), want);
                }
            }
        }
    }

    #[test]
    fn empty_bounds_rejected() {
        assert!(matches!(
            rasterize(&[], &[], MapBounds::new(p2(0.0, 0.0), p2(0.0, 4.0)), 0.2),
            Err(PlanError::BadMapShape)
        ));
    }
}
