//! Fine-grained defect mesh reconstruction.
//!
//! The sampled defect points are triangulated in 2D, restricted to the
//! instance-plus-ring region, and aligned so the boundary ring sits exactly
//! on z = 0 (the pseudo-height). The stored mesh is in this canonical frame;
//! `alignment` records the transform that was applied to get there.

use alloc::vec::Vec;

use super::{ModelError, Result, SampleLabel, SampledDefect};
use crate::geometry::{
    delaunay_2d, extract_boundary_loops, polygon_area, BoundaryLoop, GeometryError, TriMesh,
};
use crate::math::{p3, rotation_between, Point2, Point3, RigidTransform};

#[allow(unused_imports)]
use num_traits::Float;

/// Maximum RMS residual of ring points against their fitted plane.
pub const RING_PLANARITY_RMS_LIMIT: f64 = 0.005;

/// Post-alignment boundary flatness (the pseudo-height is zero).
pub const BOUNDARY_FLATNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectBuildOptions {
    /// Accept vertices above the boundary plane (bumps), off by default.
    pub allow_protrusions: bool,
    pub ring_rms_limit: f64,
}

impl Default for DefectBuildOptions {
    fn default() -> Self {
        DefectBuildOptions {
            allow_protrusions: false,
            ring_rms_limit: RING_PLANARITY_RMS_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefectMetadata {
    pub bbox_min: Point3,
    pub bbox_max: Point3,
    /// Depth below the boundary plane, meters (>= 0).
    pub max_depth: f64,
    /// Area enclosed by the boundary loop, square meters.
    pub area: f64,
}

/// Reconstructed defect model in its canonical frame: boundary on z = 0,
/// interior below.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefectModel {
    pub mesh: TriMesh,
    pub boundary: BoundaryLoop,
    /// Rigid transform that carried the sampled points into the canonical
    /// frame (its inverse restores the sensor frame).
    pub alignment: RigidTransform,
    pub metadata: DefectMetadata,
}

impl DefectModel {
    pub fn boundary_polygon_2d(&self) -> Vec<Point2> {
        self.boundary.points_2d(&self.mesh)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(&DefectBuildOptions::default())
    }

    pub fn validate_with(&self, options: &DefectBuildOptions) -> Result<()> {
        self.mesh.validate().map_err(ModelError::Geometry)?;
        let loops = extract_boundary_loops(&self.mesh).map_err(ModelError::Geometry)?;
        if loops.len() != 1 {
            return Err(ModelError::WrongBoundaryLoopCount { count: loops.len() });
        }
        if loops[0].indices.len() != self.boundary.indices.len()
            || !loop_matches(&loops[0], &self.boundary)
        {
            return Err(ModelError::WrongBoundaryLoopCount { count: loops.len() });
        }
        let on_boundary = boundary_mask(&self.mesh, &self.boundary);
        for (i, v) in self.mesh.vertices.iter().enumerate() {
            if on_boundary[i] {
                if v.z.abs() >= BOUNDARY_FLATNESS_TOL {
                    return Err(ModelError::BoundaryNotFlat {
                        vertex: i as u32,
                        z: v.z,
                    });
                }
            } else if !options.allow_protrusions && v.z > BOUNDARY_FLATNESS_TOL {
                return Err(ModelError::NotADepression {
                    vertex: i as u32,
                    z: v.z,
                });
            }
        }
        Ok(())
    }
}

fn loop_matches(a: &BoundaryLoop, b: &BoundaryLoop) -> bool {
    // Same cycle up to rotation (orientation fixed by face winding).
    let n = a.indices.len();
    if n != b.indices.len() {
        return false;
    }
    (0..n).any(|s| (0..n).all(|k| a.indices[(s + k) % n] == b.indices[k]))
}

fn boundary_mask(mesh: &TriMesh, boundary: &BoundaryLoop) -> Vec<bool> {
    let mut mask = alloc::vec![false; mesh.vertices.len()];
    for &i in &boundary.indices {
        mask[i as usize] = true;
    }
    mask
}

/// Builds a [`DefectModel`] from labeled samples.
pub fn build_defect_model(samples: &SampledDefect) -> Result<DefectModel> {
    build_defect_model_with(samples, &DefectBuildOptions::default())
}

pub fn build_defect_model_with(
    samples: &SampledDefect,
    options: &DefectBuildOptions,
) -> Result<DefectModel> {
    let ring: Vec<Point3> = samples
        .samples
        .iter()
        .filter(|s| s.label == SampleLabel::Ring)
        .map(|s| s.position)
        .collect();
    if ring.len() < 3 {
        return Err(ModelError::RingTooSmall { count: ring.len() });
    }
    // Triangulate all samples in 2D, then keep only triangles whose centroid
    // falls in the instance-plus-ring region (non-convex defects shed the
    // hull triangles spanning their notches).
    let planar: Vec<Point2> = samples.samples.iter().map(|s| s.position.xy()).collect();
    let mut mesh = delaunay_2d(&planar).map_err(ModelError::Geometry)?;
    for (v, s) in mesh.vertices.iter_mut().zip(samples.samples.iter()) {
        v.z = s.position.z;
    }
    let inv_cell = 1.0 / samples.cell_size;
    let vertices = mesh.vertices.clone();
    mesh.faces.retain(|face| {
        let centroid = face
            .iter()
            .fold(Point3::ZERO, |acc, &v| acc.add(vertices[v as usize]))
            .scale(1.0 / 3.0);
        let col = ((centroid.x - samples.origin.x) * inv_cell).floor();
        let row = ((centroid.y - samples.origin.y) * inv_cell).floor();
        col >= 0.0 && row >= 0.0 && samples.region.contains(&(col as u32, row as u32))
    });
    mesh.compact();
    if mesh.faces.is_empty() {
        return Err(ModelError::EmptyInstance);
    }
    let loops = extract_boundary_loops(&mesh).map_err(ModelError::Geometry)?;
    if loops.len() != 1 {
        return Err(ModelError::WrongBoundaryLoopCount { count: loops.len() });
    }
    let boundary = loops.into_iter().next().unwrap();
    // Ring plane in the sensor frame; align it onto z = 0.
    let plane = crate::geometry::fit_plane_least_squares(&ring).map_err(|e| match e {
        GeometryError::PlaneRankDeficient => ModelError::RingCollinear,
        GeometryError::PlaneTooFewPoints { count } => ModelError::RingTooSmall { count },
        other => ModelError::Geometry(other),
    })?;
    let rms = (ring
        .iter()
        .map(|p| plane.signed_distance(*p).powi(2))
        .sum::<f64>()
        / ring.len() as f64)
        .sqrt();
    if rms > options.ring_rms_limit {
        return Err(ModelError::RingNotPlanar {
            rms,
            limit: options.ring_rms_limit,
        });
    }
    let rotation = rotation_between(plane.normal, p3(0.0, 0.0, 1.0));
    let alignment = RigidTransform::new(rotation, p3(0.0, 0.0, -plane.offset));
    for v in mesh.vertices.iter_mut() {
        *v = alignment.apply(*v);
    }
    // Boundary vertices take the pseudo-height exactly.
    for &i in &boundary.indices {
        mesh.vertices[i as usize].z = 0.0;
    }
    if !options.allow_protrusions {
        let on_boundary = boundary_mask(&mesh, &boundary);
        for (i, v) in mesh.vertices.iter().enumerate() {
            if !on_boundary[i] && v.z > BOUNDARY_FLATNESS_TOL {
                return Err(ModelError::NotADepression {
                    vertex: i as u32,
                    z: v.z,
                });
            }
        }
    }
    let metadata = compute_metadata(&mesh, &boundary);
    let model = DefectModel {
        mesh,
        boundary,
        alignment,
        metadata,
    };
    model.validate_with(options)?;
    Ok(model)
}

fn compute_metadata(mesh: &TriMesh, boundary: &BoundaryLoop) -> DefectMetadata {
    let mut min = p3(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut max = p3(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in &mesh.vertices {
        min = p3(min.x.min(v.x), min.y.min(v.y), min.z.min(v.z));
        max = p3(max.x.max(v.x), max.y.max(v.y), max.z.max(v.z));
    }
    let poly: Vec<Point2> = boundary.points_2d(mesh);
    DefectMetadata {
        bbox_min: min,
        bbox_max: max,
        max_depth: (-min.z).max(0.0),
        area: polygon_area(&poly).abs(),
    }
}
