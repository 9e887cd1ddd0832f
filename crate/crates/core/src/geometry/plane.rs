//! Robust plane fitting: random-consensus search followed by a
//! least-squares refinement over the inliers.

use alloc::vec::Vec;
use rand::Rng;

use super::{GeometryError, Result};
use crate::math::{sym3_smallest_eigenvector, Point3};

#[allow(unused_imports)]
use num_traits::Float;

/// Consensus iterations of [`fit_plane_robust`].
pub const RANSAC_ITERATIONS: usize = 200;

/// Plane `normal . p = offset` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Plane {
    pub normal: Point3,
    pub offset: f64,
}

impl Plane {
    /// Signed distance from `p` to the plane.
    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn through(a: Point3, b: Point3, c: Point3) -> Option<Plane> {
        let n = b.sub(a).cross(c.sub(a));
        let len = n.norm();
        if len < 1e-12 {
            return None;
        }
        let normal = n.scale(1.0 / len);
        Some(Plane {
            normal,
            offset: normal.dot(a),
        }
        .oriented_up())
    }

    /// Flips the normal so it points toward +z (ties broken toward +x, +y).
    fn oriented_up(self) -> Plane {
        let n = self.normal;
        let flip = n.z < 0.0
            || (n.z == 0.0 && (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)));
        if flip {
            Plane {
                normal: n.scale(-1.0),
                offset: -self.offset,
            }
        } else {
            self
        }
    }
}

/// Least-squares plane through a point set (PCA).
pub fn fit_plane_least_squares(points: &[Point3]) -> Result<Plane> {
    if points.len() < 3 {
        return Err(GeometryError::PlaneTooFewPoints {
            count: points.len(),
        });
    }
    let inv = 1.0 / points.len() as f64;
    let mut centroid = Point3::ZERO;
    for p in points {
        centroid = centroid.add(*p);
    }
    centroid = centroid.scale(inv);
    let mut cov = [[0.0; 3]; 3];
    for p in points {
        let d = p.sub(centroid);
        let v = [d.x, d.y, d.z];
        for (i, row) in cov.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += v[i] * v[j];
            }
        }
    }
    // Rank check: the two largest principal components must be nonzero or
    // the inliers are collinear/coincident.
    let normal = sym3_smallest_eigenvector(&cov);
    let mut residual_ok = false;
    for p in points {
        let d = p.sub(centroid);
        let in_plane = d.sub(normal.scale(d.dot(normal)));
        if in_plane.norm() > 1e-9 {
            residual_ok = true;
            break;
        }
    }
    if !residual_ok {
        return Err(GeometryError::PlaneRankDeficient);
    }
    if rank2_deficient(points, centroid, normal) {
        return Err(GeometryError::PlaneRankDeficient);
    }
    Ok(Plane {
        normal,
        offset: normal.dot(centroid),
    }
    .oriented_up())
}

/// True when the points projected into the plane are collinear, i.e. the
/// plane orientation is not actually determined.
fn rank2_deficient(points: &[Point3], centroid: Point3, normal: Point3) -> bool {
    let mut first_dir: Option<Point3> = None;
    for p in points {
        let d = p.sub(centroid);
        let ip = d.sub(normal.scale(d.dot(normal)));
        if ip.norm() < 1e-9 {
            continue;
        }
        match first_dir {
            None => first_dir = Some(ip.normalized()),
            Some(dir) => {
                if dir.cross(ip.normalized()).norm() > 1e-7 {
                    return false;
                }
            }
        }
    }
    true
}

/// Robust plane fit: RANSAC consensus over `RANSAC_ITERATIONS` samples,
/// then least-squares refinement over the winning inlier set. Returns the
/// refined plane and the final inlier mask. Deterministic for a given seed.
pub fn fit_plane_robust(
    points: &[Point3],
    inlier_tol: f64,
    seed: u64,
) -> Result<(Plane, Vec<bool>)> {
    if points.len() < 3 {
        return Err(GeometryError::PlaneTooFewPoints {
            count: points.len(),
        });
    }
    let mut rng = crate::rng::seeded_rng(seed);
    let n = points.len();
    let mut best: Option<(usize, Plane)> = None;
    for _ in 0..RANSAC_ITERATIONS {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let k = rng.random_range(0..n);
        if i == j || j == k || i == k {
            continue;
        }
        let Some(plane) = Plane::through(points[i], points[j], points[k]) else {
            continue;
        };
        let count = points
            .iter()
            .filter(|p| plane.signed_distance(**p).abs() <= inlier_tol)
            .count();
        // Strict improvement keeps the first-best sample, so results do not
        // depend on tie order.
        if best.as_ref().map_or(true, |(c, _)| count > *c) {
            best = Some((count, plane));
        }
    }
    let (_, consensus) = best.ok_or(GeometryError::PlaneRankDeficient)?;
    let inliers: Vec<Point3> = points
        .iter()
        .filter(|p| consensus.signed_distance(**p).abs() <= inlier_tol)
        .copied()
        .collect();
    let refined = fit_plane_least_squares(&inliers)?;
    let mask: Vec<bool> = points
        .iter()
        .map(|p| refined.signed_distance(*p).abs() <= inlier_tol)
        .collect();
    Ok((refined, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p3;
    use rand::Rng;

    #[test]
    fn exact_ground_plane() {
        let pts: Vec<Point3> = (0..100)
            .map(|k| p3((k % 10) as f64, (k / 10) as f64, 0.0))
            .collect();
        let (plane, mask) = fit_plane_robust(&pts, 0.02, 1).unwrap();
        assert!(plane.normal.z.abs() > 1.0 - 1e-9);
        assert!(plane.offset.abs() < 1e-9);
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn noisy_plane_with_outliers() {
        let mut rng = crate::rng::seeded_rng(3);
        let mut pts = Vec::new();
        for k in 0..180 {
            let x = (k % 20) as f64 * 0.3;
            let y = (k / 20) as f64 * 0.3;
            let noise = rng.random::<f64>() * 0.002 - 0.001;
            pts.push(p3(x, y, 0.5 + noise));
        }
        for k in 0..20 {
            pts.push(p3(k as f64 * 0.2, 1.0, 1.0)); // elevated outliers
        }
        let (plane, mask) = fit_plane_robust(&pts, 0.02, 9).unwrap();
        let z_at = |x: f64, y: f64| (plane.offset - plane.normal.x * x - plane.normal.y * y) / plane.normal.z;
        assert!((z_at(1.0, 1.0) - 0.5).abs() < 0.01);
        for m in &mask[180..] {
            assert!(!m, "outliers must be excluded");
        }
    }

    #[test]
    fn three_points_interpolating_plane() {
        let pts = [p3(0.0, 0.0, 1.0), p3(1.0, 0.0, 2.0), p3(0.0, 1.0, 3.0)];
        let (plane, mask) = fit_plane_robust(&pts, 0.02, 5).unwrap();
        for p in &pts {
            assert!(plane.signed_distance(*p).abs() < 1e-9);
        }
        assert!(mask.iter().all(|&m| m));
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = [p3(0.0, 0.0, 0.0), p3(1.0, 0.0, 0.0)];
        assert!(matches!(
            fit_plane_robust(&pts, 0.02, 0),
            Err(GeometryError::PlaneTooFewPoints { count: 2 })
        ));
    }

    #[test]
    fn collinear_points_rank_deficient() {
        let pts: Vec<Point3> = (0..10).map(|k| p3(k as f64, 2.0 * k as f64, 0.0)).collect();
        assert!(matches!(
            fit_plane_robust(&pts, 0.02, 0),
            Err(GeometryError::PlaneRankDeficient)
        ));
    }
}
