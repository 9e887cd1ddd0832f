//! Registered point clouds, semantic mask filtering and ground leveling.

use alloc::vec::Vec;

use super::{ModelError, Result, DEFAULT_GROUND_INLIER_TOL};
use crate::geometry::fit_plane_robust;
use crate::math::{p3, rotation_between, Point3, RigidTransform};

#[allow(unused_imports)]
use num_traits::Float;

/// Point cloud in a common world frame, optionally tagged with the source
/// frame each point came from.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegisteredCloud {
    pub points: Vec<Point3>,
    pub source_frames: Option<Vec<u32>>,
}

impl RegisteredCloud {
    pub fn from_points(points: Vec<Point3>) -> Self {
        RegisteredCloud {
            points,
            source_frames: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Binary road mask with a 3x4 projection from world space to pixels.
#[derive(Debug, Clone)]
pub struct SemanticMask {
    pub width: u32,
    pub height: u32,
    /// Row-major, `true` = road.
    data: Vec<bool>,
    /// Maps homogeneous world points to pixel coordinates.
    pub projection: [[f64; 4]; 3],
}

impl SemanticMask {
    pub fn new(width: u32, height: u32, data: Vec<bool>, projection: [[f64; 4]; 3]) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != (width as usize) * (height as usize) {
            return Err(ModelError::BadMaskShape {
                width,
                height,
                len: data.len(),
            });
        }
        if !full_row_rank(&projection) {
            return Err(ModelError::DegenerateProjection);
        }
        Ok(SemanticMask {
            width,
            height,
            data,
            projection,
        })
    }

    pub fn road_at(&self, col: u32, row: u32) -> bool {
        self.data[row as usize * self.width as usize + col as usize]
    }

    /// Projects a world point; returns the pixel when it lands inside the
    /// image with positive projective depth.
    pub fn project(&self, p: Point3) -> Option<(u32, u32)> {
        let h = [p.x, p.y, p.z, 1.0];
        let mut uvw = [0.0; 3];
        for (i, row) in self.projection.iter().enumerate() {
            uvw[i] = row[0] * h[0] + row[1] * h[1] + row[2] * h[2] + row[3] * h[3];
        }
        if uvw[2] <= 0.0 {
            return None;
        }
        let col = (uvw[0] / uvw[2]).floor();
        let row = (uvw[1] / uvw[2]).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((col as u32, row as u32))
    }
}

fn full_row_rank(m: &[[f64; 4]; 3]) -> bool {
    // Gaussian elimination on the 3x4; all three pivots must be nonzero.
    let mut a = *m;
    let mut rank = 0;
    for col in 0..4 {
        if rank == 3 {
            break;
        }
        let mut pivot = rank;
        for r in rank..3 {
            if a[r][col].abs() > a[pivot][col].abs() {
                pivot = r;
            }
        }
        if a[pivot][col].abs() < 1e-12 {
            continue;
        }
        a.swap(rank, pivot);
        for r in (rank + 1)..3 {
            let f = a[r][col] / a[rank][col];
            for c in col..4 {
                a[r][c] -= f * a[rank][c];
            }
        }
        rank += 1;
    }
    rank == 3
}

/// Keeps exactly the points whose projection lands on a road-labeled pixel
/// with positive projective depth.
pub fn filter_points_by_mask(cloud: &RegisteredCloud, mask: &SemanticMask) -> RegisteredCloud {
    let mut points = Vec::new();
    let mut frames = cloud.source_frames.as_ref().map(|_| Vec::new());
    for (i, p) in cloud.points.iter().enumerate() {
        let keep = mask
            .project(*p)
            .map(|(c, r)| mask.road_at(c, r))
            .unwrap_or(false);
        if keep {
            points.push(*p);
            if let (Some(out), Some(src)) = (frames.as_mut(), cloud.source_frames.as_ref()) {
                out.push(src[i]);
            }
        }
    }
    RegisteredCloud {
        points,
        source_frames: frames,
    }
}

/// Rotates/translates the cloud so its robust-fit ground plane maps to z=0
/// with normal +z. Returns the leveled cloud and the applied transform.
pub fn level_to_ground(
    cloud: &RegisteredCloud,
    seed: u64,
) -> Result<(RegisteredCloud, RigidTransform)> {
    let (plane, _) = fit_plane_robust(&cloud.points, DEFAULT_GROUND_INLIER_TOL, seed)?;
    let rotation = rotation_between(plane.normal, p3(0.0, 0.0, 1.0));
    // After rotation the plane becomes z = offset; drop it to zero.
    let transform = RigidTransform::new(rotation, p3(0.0, 0.0, -plane.offset));
    let points = cloud.points.iter().map(|p| transform.apply(*p)).collect();
    Ok((
        RegisteredCloud {
            points,
            source_frames: cloud.source_frames.clone(),
        },
        transform,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::mat3_from_axis_angle;
    use rand::Rng;

    fn grid_cloud() -> RegisteredCloud {
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                pts.push(p3(i as f64 * 0.5, j as f64 * 0.5, 0.0));
            }
        }
        RegisteredCloud::from_points(pts)
    }

    /// Orthographic top-down projection: pixel = floor(point.xy / 0.5).
    fn top_down_mask(data: Vec<bool>) -> SemanticMask {
        let proj = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        SemanticMask::new(20, 20, data, proj).unwrap()
    }

    #[test]
    fn all_ones_mask_is_identity() {
        let cloud = grid_cloud();
        let mask = top_down_mask(alloc::vec![true; 400]);
        let out = filter_points_by_mask(&cloud, &mask);
        // Points on the far borders project to pixel 20 and fall outside.
        let inside = cloud
            .points
            .iter()
            .filter(|p| p.x < 10.0 && p.y < 10.0)
            .count();
        assert_eq!(out.len(), inside);
    }

    #[test]
    fn all_zeros_mask_empties_cloud() {
        let out = filter_points_by_mask(&grid_cloud(), &top_down_mask(alloc::vec![false; 400]));
        assert!(out.is_empty());
    }

    #[test]
    fn half_plane_mask_keeps_predicted_half() {
        // Road pixels only where column < 10, i.e. x < 5.0.
        let mut data = alloc::vec![false; 400];
        for r in 0..20 {
            for c in 0..10 {
                data[r * 20 + c] = true;
            }
        }
        let cloud = grid_cloud();
        let mask = top_down_mask(data);
        let out = filter_points_by_mask(&cloud, &mask);
        let oracle: Vec<Point3> = cloud
            .points
            .iter()
            .copied()
            .filter(|p| p.x < 5.0 && p.y < 10.0)
            .collect();
        assert_eq!(out.points, oracle);
    }

    #[test]
    fn degenerate_projection_rejected() {
        let proj = [
            [1.0, 0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert!(matches!(
            SemanticMask::new(4, 4, alloc::vec![true; 16], proj),
            Err(ModelError::DegenerateProjection)
        ));
    }

    #[test]
    fn leveling_flat_cloud_is_identity() {
        let (leveled, t) = level_to_ground(&grid_cloud(), 1).unwrap();
        assert!(t.deviation_from_identity() < 1e-9);
        for (a, b) in leveled.points.iter().zip(grid_cloud().points.iter()) {
            assert!(a.dist(*b) < 1e-9);
        }
    }

    #[test]
    fn leveling_recovers_known_tilt() {
        let angle = 2.0f64.to_radians();
        let rot = mat3_from_axis_angle(p3(0.0, 1.0, 0.0), angle);
        let tilted: Vec<Point3> = grid_cloud()
            .points
            .iter()
            .map(|p| crate::math::mat3_mul_vec(&rot, *p))
            .collect();
        let (leveled, t) = level_to_ground(&RegisteredCloud::from_points(tilted), 2).unwrap();
        for p in &leveled.points {
            assert!(p.z.abs() < 1e-6, "flattened within 1e-6: {}", p.z);
        }
        // The recovered rotation must match the inverse tilt.
        let expect = mat3_from_axis_angle(p3(0.0, 1.0, 0.0), -angle);
        for i in 0..3 {
            for j in 0..3 {
                assert!((t.rotation[i][j] - expect[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn elevated_outliers_do_not_tilt_result() {
        let mut rng = crate::rng::seeded_rng(5);
        let mut pts = grid_cloud().points;
        let n = pts.len();
        for _ in 0..n / 10 {
            pts.push(p3(
                rng.random::<f64>() * 10.0,
                rng.random::<f64>() * 10.0,
                1.0 + rng.random::<f64>(),
            ));
        }
        let (_, t) = level_to_ground(&RegisteredCloud::from_points(pts), 3).unwrap();
        // Rotation angle stays below 0.1 degrees.
        let cos_angle = t.rotation[2][2].clamp(-1.0, 1.0);
        assert!(cos_angle.acos() < 0.1f64.to_radians());
    }
}
