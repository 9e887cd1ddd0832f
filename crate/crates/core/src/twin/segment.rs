//! Planar road segments, the host geometry for defect integration.

use alloc::string::String;
use alloc::vec::Vec;

use super::{Result, TwinError};
use crate::geometry::{
    extract_boundary_loops, point_strictly_in_polygon, polygon_area, CdtProblem, TriMesh,
};
use crate::math::{p2, Point2};

#[allow(unused_imports)]
use num_traits::Float;

/// Planar (z = 0) road segment with its outer boundary polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSegment {
    pub id: String,
    pub mesh: TriMesh,
    /// Counterclockwise outer polygon; the mesh boundary equals it.
    pub outer: Vec<Point2>,
}

impl RoadSegment {
    /// Builds a planar segment mesh for `polygon`, refined with interior
    /// grid points spaced `max_edge` apart so later cuts stay local.
    pub fn planar(id: &str, polygon: &[Point2], max_edge: f64) -> Result<Self> {
        let mut outer = polygon.to_vec();
        if polygon_area(&outer) < 0.0 {
            outer.reverse();
        }
        let mut points = outer.clone();
        if max_edge > 0.0 {
            let (min, max) = bbox(&outer);
            let margin = 0.25 * max_edge;
            let mut y = min.y + max_edge;
            while y < max.y {
                let mut x = min.x + max_edge;
                while x < max.x {
                    let p = p2(x, y);
                    if point_strictly_in_polygon(p, &outer, 1e-9)
                        && distance_to_boundary(p, &outer) > margin
                    {
                        points.push(p);
                    }
                    x += max_edge;
                }
                y += max_edge;
            }
        }
        let mut prob = CdtProblem::new(points);
        let loop_ids: Vec<u32> = (0..outer.len() as u32).collect();
        prob.set_outer_loop(&loop_ids);
        let mesh = prob.triangulate()?;
        let segment = RoadSegment {
            id: String::from(id),
            mesh,
            outer,
        };
        segment.validate()?;
        Ok(segment)
    }

    /// Checks that the mesh boundary is a single loop equal to `outer`.
    pub fn validate(&self) -> Result<()> {
        self.mesh.validate()?;
        let loops = extract_boundary_loops(&self.mesh)?;
        if loops.len() != 1 {
            return Err(TwinError::SegmentMeshMismatch {
                segment: self.id.clone(),
            });
        }
        let pts = loops[0].points_2d(&self.mesh);
        if !super::validate::same_point_set_2d(&pts, &self.outer, 1e-9) {
            return Err(TwinError::SegmentMeshMismatch {
                segment: self.id.clone(),
            });
        }
        Ok(())
    }
}

pub(super) fn bbox(poly: &[Point2]) -> (Point2, Point2) {
    let mut min = p2(f64::INFINITY, f64::INFINITY);
    let mut max = p2(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        min = p2(min.x.min(p.x), min.y.min(p.y));
        max = p2(max.x.max(p.x), max.y.max(p.y));
    }
    (min, max)
}

fn distance_to_boundary(p: Point2, poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let d = b.sub(a);
        let len2 = d.dot(d);
        let t = if len2 > 0.0 {
            (p.sub(a).dot(d) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        best = best.min(p.dist(a.add(d.scale(t))));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_segment_refined() {
        let poly = alloc::vec![p2(0.0, 0.0), p2(10.0, 0.0), p2(10.0, 6.0), p2(0.0, 6.0)];
        let seg = RoadSegment::planar("s0", &poly, 2.0).unwrap();
        assert!(seg.mesh.faces.len() > 2, "interior refinement expected");
        assert!((seg.mesh.area_2d() - 60.0).abs() < 1e-9);
        seg.validate().unwrap();
    }

    #[test]
    fn l_shaped_segment() {
        let poly = alloc::vec![
            p2(0.0, 0.0),
            p2(8.0, 0.0),
            p2(8.0, 3.0),
            p2(3.0, 3.0),
            p2(3.0, 8.0),
            p2(0.0, 8.0),
        ];
        let seg = RoadSegment::planar("L", &poly, 1.5).unwrap();
        let want = polygon_area(&poly).abs();
        assert!((seg.mesh.area_2d() - want).abs() < 1e-9);
    }

    #[test]
    fn clockwise_input_normalized() {
        let mut poly = alloc::vec![p2(0.0, 0.0), p2(10.0, 0.0), p2(10.0, 6.0), p2(0.0, 6.0)];
        poly.reverse();
        let seg = RoadSegment::planar("cw", &poly, 0.0).unwrap();
        assert!(polygon_area(&seg.outer) > 0.0);
    }
}
