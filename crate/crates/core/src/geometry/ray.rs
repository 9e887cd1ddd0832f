//! Möller-Trumbore ray/triangle intersection.

use crate::math::Point3;

#[allow(unused_imports)]
use num_traits::Float;

/// Determinants smaller than this are treated as parallel or degenerate.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// A ray/triangle hit: `origin + t * direction = (1-u-v) p0 + u p1 + v p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    /// Ray parameter, >= 0 (rays, not lines).
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// Outcome of a ray cast. A degenerate (zero-area) triangle is reported
/// distinctly from a miss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayCast {
    Hit(RayHit),
    Miss,
    DegenerateTriangle,
}

impl RayCast {
    pub fn hit(self) -> Option<RayHit> {
        match self {
            RayCast::Hit(h) => Some(h),
            _ => None,
        }
    }
}

/// Intersects a ray with a triangle, two-sided.
///
/// Returns a hit only when `t >= 0` and the barycentric constraints
/// `0 <= u`, `0 <= v`, `u + v <= 1` hold (boundaries inclusive).
pub fn ray_triangle_intersect(origin: Point3, direction: Point3, tri: [Point3; 3]) -> RayCast {
    let e1 = tri[1].sub(tri[0]);
    let e2 = tri[2].sub(tri[0]);
    if e1.cross(e2).norm() < DEGENERACY_EPS {
        return RayCast::DegenerateTriangle;
    }
    let pvec = direction.cross(e2);
    let det = e1.dot(pvec);
    if det.abs() < DEGENERACY_EPS {
        return RayCast::Miss; // ray parallel to triangle plane
    }
    let inv_det = 1.0 / det;
    let tvec = origin.sub(tri[0]);
    let u = tvec.dot(pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return RayCast::Miss;
    }
    let qvec = tvec.cross(e1);
    let v = direction.dot(qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return RayCast::Miss;
    }
    let t = e2.dot(qvec) * inv_det;
    if t < 0.0 {
        return RayCast::Miss;
    }
    RayCast::Hit(RayHit { t, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p3;

    fn unit_tri() -> [Point3; 3] {
        [p3(0.0, 0.0, 0.0), p3(1.0, 0.0, 0.0), p3(0.0, 1.0, 0.0)]
    }

    #[test]
    fn vertex_hit_at_p0() {
        let hit = ray_triangle_intersect(p3(0.0, 0.0, 1.0), p3(0.0, 0.0, -1.0), unit_tri())
            .hit()
            .unwrap();
        assert!((hit.t - 1.0).abs() < 1e-12);
        assert!(hit.u.abs() < 1e-12 && hit.v.abs() < 1e-12);
    }

    #[test]
    fn barycentric_identity() {
        let hit = ray_triangle_intersect(p3(0.25, 0.25, 2.0), p3(0.0, 0.0, -1.0), unit_tri())
            .hit()
            .unwrap();
        assert!((hit.t - 2.0).abs() < 1e-12);
        assert!((hit.u - 0.25).abs() < 1e-12);
        assert!((hit.v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn outside_barycentric_range_misses() {
        let cast = ray_triangle_intersect(p3(2.0, 2.0, 1.0), p3(0.0, 0.0, -1.0), unit_tri());
        assert_eq!(cast, RayCast::Miss);
    }

    #[test]
    fn behind_origin_misses() {
        let cast = ray_triangle_intersect(p3(0.25, 0.25, -1.0), p3(0.0, 0.0, -1.0), unit_tri());
        assert_eq!(cast, RayCast::Miss);
    }

    #[test]
    fn degenerate_triangle_flagged() {
        let tri = [p3(0.0, 0.0, 0.0), p3(1.0, 0.0, 0.0), p3(2.0, 0.0, 0.0)];
        let cast = ray_triangle_intersect(p3(0.5, 0.0, 1.0), p3(0.0, 0.0, -1.0), tri);
        assert_eq!(cast, RayCast::DegenerateTriangle);
    }
}
