//! 2D polygon predicates: point-in-polygon, segment intersection,
//! triangle/polygon overlap and the shoelace area.

use crate::math::Point2;

#[allow(unused_imports)]
use num_traits::Float;

/// Signed shoelace area of a closed polygon (vertices listed once).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a.cross(b);
    }
    acc * 0.5
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(a: Point2, b: Point2, p: Point2, eps: f64) -> bool {
    if orient(a, b, p).abs() > eps * a.dist(b).max(1.0) {
        return false;
    }
    p.x >= a.x.min(b.x) - eps
        && p.x <= a.x.max(b.x) + eps
        && p.y >= a.y.min(b.y) - eps
        && p.y <= a.y.max(b.y) + eps
}

/// True if point `p` is inside the polygon or on its boundary
/// (even-odd rule for the interior).
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    for i in 0..n {
        if on_segment(poly[i], poly[(i + 1) % n], p, 1e-12) {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// True if point `p` is strictly inside (not on the boundary).
pub fn point_strictly_in_polygon(p: Point2, poly: &[Point2], eps: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        if on_segment(poly[i], poly[(i + 1) % n], p, eps) {
            return false;
        }
    }
    point_in_polygon(p, poly)
}

/// True if closed segments `a0-a1` and `b0-b1` intersect (touching counts).
pub fn segments_intersect(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(b0, b1, a0, 1e-12))
        || (d2 == 0.0 && on_segment(b0, b1, a1, 1e-12))
        || (d3 == 0.0 && on_segment(a0, a1, b0, 1e-12))
        || (d4 == 0.0 && on_segment(a0, a1, b1, 1e-12))
}

fn point_in_triangle(p: Point2, tri: &[Point2; 3]) -> bool {
    let d0 = orient(tri[0], tri[1], p);
    let d1 = orient(tri[1], tri[2], p);
    let d2 = orient(tri[2], tri[0], p);
    let has_neg = d0 < 0.0 || d1 < 0.0 || d2 < 0.0;
    let has_pos = d0 > 0.0 || d1 > 0.0 || d2 > 0.0;
    !(has_neg && has_pos)
}

/// True if point `p` is strictly inside the triangle, with an `eps` margin
/// away from the edges (scaled by the triangle size).
pub fn point_strictly_in_triangle(p: Point2, tri: &[Point2; 3], eps: f64) -> bool {
    let scale = tri[0].dist(tri[1]).max(tri[1].dist(tri[2])).max(1e-30);
    let m = eps * scale;
    let d0 = orient(tri[0], tri[1], p);
    let d1 = orient(tri[1], tri[2], p);
    let d2 = orient(tri[2], tri[0], p);
    (d0 > m && d1 > m && d2 > m) || (d0 < -m && d1 < -m && d2 < -m)
}

/// Outcome of [`triangle_polygon_overlap_2d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriPolyOverlap {
    Overlaps,
    Disjoint,
    DegenerateTriangle,
}

impl TriPolyOverlap {
    pub fn overlaps(self) -> bool {
        self == TriPolyOverlap::Overlaps
    }
}

/// True iff the triangle's 2D area intersects the polygon's interior or
/// boundary. Boundary contact (a shared vertex or edge touch) counts as
/// overlapping. The polygon must be simple.
pub fn triangle_polygon_overlap_2d(tri: [Point2; 3], poly: &[Point2]) -> TriPolyOverlap {
    let area2 = tri[1].sub(tri[0]).cross(tri[2].sub(tri[0]));
    if area2.abs() < 1e-12 {
        return TriPolyOverlap::DegenerateTriangle;
    }
    for &v in &tri {
        if point_in_polygon(v, poly) {
            return TriPolyOverlap::Overlaps;
        }
    }
    for &p in poly {
        if point_in_triangle(p, &tri) {
            return TriPolyOverlap::Overlaps;
        }
    }
    let n = poly.len();
    for k in 0..3 {
        let (a0, a1) = (tri[k], tri[(k + 1) % 3]);
        for i in 0..n {
            if segments_intersect(a0, a1, poly[i], poly[(i + 1) % n]) {
                return TriPolyOverlap::Overlaps;
            }
        }
    }
    TriPolyOverlap::Disjoint
}

/// True if two simple polygons have disjoint closed regions
/// (no containment, no boundary contact).
pub fn polygons_disjoint(a: &[Point2], b: &[Point2]) -> bool {
    for &p in a {
        if point_in_polygon(p, b) {
            return false;
        }
    }
    for &p in b {
        if point_in_polygon(p, a) {
            return false;
        }
    }
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        for j in 0..nb {
            if segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                return false;
            }
        }
    }
    true
}

/// A point guaranteed to lie in the closed intersection of a triangle and a
/// polygon known to overlap. Used to anchor confirmation ray casts.
pub fn overlap_witness(tri: [Point2; 3], poly: &[Point2]) -> Option<Point2> {
    for &v in &tri {
        if point_in_polygon(v, poly) {
            return Some(v);
        }
    }
    for &p in poly {
        if point_in_triangle(p, &tri) {
            return Some(p);
        }
    }
    // Edges must cross; take the midpoint of one crossing pair's clip.
    let n = poly.len();
    for k in 0..3 {
        let (a0, a1) = (tri[k], tri[(k + 1) % 3]);
        for i in 0..n {
            let (b0, b1) = (poly[i], poly[(i + 1) % n]);
            if segments_intersect(a0, a1, b0, b1) {
                let d = a1.sub(a0);
                let e = b1.sub(b0);
                let denom = d.cross(e);
                if denom.abs() > 1e-15 {
                    let t = b0.sub(a0).cross(e) / denom;
                    return Some(a0.add(d.scale(t.clamp(0.0, 1.0))));
                }
                return Some(a0);
            }
        }
    }
    None
}
