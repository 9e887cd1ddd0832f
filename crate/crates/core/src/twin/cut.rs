//! Hole cutting: removes exactly the faces whose vertical projection
//! intersects a placement's boundary polygon.

use alloc::vec::Vec;

use super::{Result, TwinError};
use crate::geometry::{
    extract_boundary_loops, overlap_witness, polygon_area, ray_triangle_intersect,
    segments_intersect, triangle_polygon_overlap_2d, TriMesh, TriPolyOverlap,
};
use crate::math::{p3, Point2};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct CutOutcome {
    pub mesh: TriMesh,
    /// Indices of removed faces, in the input mesh's numbering.
    pub removed_faces: Vec<u32>,
    /// Old vertex index -> new index (`u32::MAX` when dropped).
    pub vertex_map: Vec<u32>,
}

/// Removes the faces of `mesh` whose 2D projection intersects `polygon`.
///
/// The 2D overlap test decides removal; each removal is confirmed by a
/// downward ray cast from a point of the overlap region. The polygon
/// must lie strictly inside the mesh's outer boundary.
pub fn cut_hole(mesh: &TriMesh, polygon: &[Point2]) -> Result<CutOutcome> {
    let loops = extract_boundary_loops(mesh)?;
    let outer = loops
        .iter()
        .map(|l| l.points_2d(mesh))
        .max_by(|a, b| {
            polygon_area(a)
                .abs()
                .total_cmp(&polygon_area(b).abs())
        })
        .ok_or(TwinError::HoleLoopNotFound { loops: 0 })?;
    check_strictly_inside(polygon, &outer)?;
    let z_top = mesh
        .vertices
        .iter()
        .map(|v| v.z)
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let mut removed_faces = Vec::new();
    let mut kept = Vec::new();
    for f in 0..mesh.faces.len() {
        let tri2 = mesh.face_points_2d(f);
        match triangle_polygon_overlap_2d(tri2, polygon) {
            TriPolyOverlap::Overlaps => {
                // Möller-Trumbore confirmation from a witness of the overlap.
                // Grazing contacts put the witness exactly on a face edge;
                // nudge it toward the face centroid to absorb roundoff.
                let w = overlap_witness(tri2, polygon)
                    .ok_or(TwinError::CutConfirmationFailed { face: f })?;
                let centroid = tri2[0].add(tri2[1]).add(tri2[2]).scale(1.0 / 3.0);
                let confirmed = [0.0, 1e-9, 1e-6].iter().any(|&blend| {
                    let q = w.add(centroid.sub(w).scale(blend));
                    ray_triangle_intersect(
                        p3(q.x, q.y, z_top),
                        p3(0.0, 0.0, -1.0),
                        mesh.face_points(f),
                    )
                    .hit()
                    .is_some()
                });
                if !confirmed {
                    return Err(TwinError::CutConfirmationFailed { face: f });
                }
                removed_faces.push(f as u32);
            }
            _ => kept.push(mesh.faces[f]),
        }
    }
    let mut cut = TriMesh::new(mesh.vertices.clone(), kept);
    let vertex_map = cut.compact();
    Ok(CutOutcome {
        mesh: cut,
        removed_faces,
        vertex_map,
    })
}

fn check_strictly_inside(polygon: &[Point2], outer: &[Point2]) -> Result<()> {
    for &p in polygon {
        if !crate::geometry::point_strictly_in_polygon(p, outer, 1e-9) {
            return Err(TwinError::PolygonTouchesBoundary);
        }
    }
    let (n, m) = (polygon.len(), outer.len());
    for i in 0..n {
        for j in 0..m {
            if segments_intersect(
                polygon[i],
                polygon[(i + 1) % n],
                outer[j],
                outer[(j + 1) % m],
            ) {
                return Err(TwinError::PolygonTouchesBoundary);
            }
        }
    }
    Ok(())
}
