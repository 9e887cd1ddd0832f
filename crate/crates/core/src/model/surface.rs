//! Coarse road-surface reconstruction (2.5D heightfield mesh).

use alloc::vec::Vec;

use super::{ModelError, Result};
use crate::geometry::{delaunay_2d, voxel_downsample, HeightIndex, TriMesh};
use crate::math::{Point2, RigidTransform};

#[allow(unused_imports)]
use num_traits::Float;

/// Default voxel leaf for the coarse stream.
pub const DEFAULT_SURFACE_LEAF: f64 = 0.5;

/// 2.5D road-surface mesh: one vertex per planar location, with a
/// nearest-neighbor height index and the leveling transform applied during
/// ground alignment.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    mesh: TriMesh,
    leveling: RigidTransform,
    index: HeightIndex,
}

impl SurfaceModel {
    /// Wraps a reconstructed mesh, checking that it projects injectively to
    /// the horizontal plane (no two vertices share (x, y) within 1e-6 m).
    pub fn from_mesh(mesh: TriMesh, leveling: RigidTransform) -> Result<Self> {
        mesh.validate().map_err(ModelError::Geometry)?;
        if let Some((a, b)) = planar_duplicate(&mesh) {
            return Err(ModelError::DuplicatePlanarCoordinates { a, b });
        }
        let index = HeightIndex::build(&mesh.vertices)?;
        Ok(SurfaceModel {
            mesh,
            leveling,
            index,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn leveling(&self) -> &RigidTransform {
        &self.leveling
    }

    /// Height of the nearest surface vertex in (x, y), ties to the lowest
    /// vertex index.
    pub fn nearest_height(&self, xy: Point2) -> f64 {
        self.index.nearest_height(xy)
    }
}

fn planar_duplicate(mesh: &TriMesh) -> Option<(u32, u32)> {
    let mut order: Vec<u32> = (0..mesh.vertices.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let (pa, pb) = (mesh.vertices[a as usize], mesh.vertices[b as usize]);
        pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
    });
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            let (a, b) = (order[i], order[j]);
            let (pa, pb) = (mesh.vertices[a as usize], mesh.vertices[b as usize]);
            if pb.x - pa.x > 1e-6 {
                break;
            }
            if pa.xy().dist(pb.xy()) < 1e-6 {
                return Some((a.min(b), a.max(b)));
            }
        }
    }
    None
}

/// Reconstructs a surface model from a leveled cloud: voxel-downsamples at
/// `leaf`, triangulates the 2D projection, restores vertex elevations from
/// the downsampled centroids.
pub fn reconstruct_surface(cloud: &super::RegisteredCloud, leaf: f64) -> Result<SurfaceModel> {
    let kept = voxel_downsample(&cloud.points, leaf);
    if kept.len() < 3 {
        return Err(ModelError::TooFewSurfacePoints { count: kept.len() });
    }
    let planar: Vec<Point2> = kept.iter().map(|p| p.xy()).collect();
    let mut mesh = delaunay_2d(&planar)?;
    // delaunay_2d preserves point order, so elevations restore one-to-one.
    for (v, src) in mesh.vertices.iter_mut().zip(kept.iter()) {
        v.z = src.z;
    }
    SurfaceModel::from_mesh(mesh, RigidTransform::IDENTITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{p2, p3, Point3};

    #[test]
    fn four_corner_flat_patch() {
        let pts = alloc::vec![
            p3(0.0, 0.0, 0.0),
            p3(1.0, 0.0, 0.0),
            p3(1.0, 1.0, 0.0),
            p3(0.0, 1.0, 0.0),
        ];
        let s = reconstruct_surface(&crate::model::RegisteredCloud::from_points(pts), 0.1).unwrap();
        assert_eq!(s.mesh().faces.len(), 2);
        assert!(s.mesh().vertices.iter().all(|v| v.z == 0.0));
    }

    #[test]
    fn sinusoidal_road_heights_match_downsampling_oracle() {
        let mut pts = Vec::new();
        for i in 0..160 {
            for j in 0..20 {
                let x = i as f64 * 0.25;
                let y = j as f64 * 0.25;
                pts.push(p3(x, y, 0.05 * x.sin()));
            }
        }
        let leaf = 0.5;
        let s =
            reconstruct_surface(&crate::model::RegisteredCloud::from_points(pts.clone()), leaf)
                .unwrap();
        let oracle = crate::geometry::voxel_downsample(&pts, leaf);
        assert_eq!(s.mesh().vertices.len(), oracle.len());
        for (v, o) in s.mesh().vertices.iter().zip(oracle.iter()) {
            assert!((v.z - o.z).abs() < 1e-9);
        }
        // Height queries hit the nearest retained centroid.
        let q = p2(5.1, 2.6);
        let mut best = (f64::INFINITY, 0.0);
        for o in &oracle {
            let d = q.dist2(o.xy());
            if d < best.0 {
                best = (d, o.z);
            }
        }
        assert_eq!(s.nearest_height(q), best.1);
    }

    #[test]
    fn duplicate_planar_coordinates_rejected() {
        // Two vertices stacked vertically survive downsampling with a tiny
        // leaf and must be rejected as non-injective.
        let pts: Vec<Point3> = alloc::vec![
            p3(0.0, 0.0, 0.0),
            p3(1.0, 0.0, 0.0),
            p3(0.0, 1.0, 0.0),
            p3(1.0, 1.0, 0.0),
            p3(1.0, 1.0, 5.0),
        ];
        let err = reconstruct_surface(&crate::model::RegisteredCloud::from_points(pts), 0.01)
            .unwrap_err();
        assert!(
            matches!(
                err,
                ModelError::DuplicatePlanarCoordinates { .. } | ModelError::Geometry(_)
            ),
            "{err:?}"
        );
    }
}
