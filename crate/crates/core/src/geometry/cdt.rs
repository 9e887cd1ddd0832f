//! Constrained Delaunay triangulation.
//!
//! Constraint edges are recovered by flipping the edges they cross, then the
//! triangulation is trimmed against an optional outer loop and hole loops
//! (triangles inside a hole, or outside the outer loop, are omitted).

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use super::delaunay::{canonical_face, find_duplicates, Triangulation};
use super::polygon::point_in_polygon;
use super::{GeometryError, Result, TriMesh};
use crate::math::{p3, Point2};

#[allow(unused_imports)]
use num_traits::Float;

/// A constrained triangulation problem over a fixed point set.
#[derive(Debug, Clone, Default)]
pub struct CdtProblem {
    points: Vec<Point2>,
    constraints: Vec<(u32, u32)>,
    outer: Option<Vec<u32>>,
    holes: Vec<Vec<u32>>,
}

impl CdtProblem {
    pub fn new(points: Vec<Point2>) -> Self {
        CdtProblem {
            points,
            ..Default::default()
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Forces the edge `(a, b)` to appear in the output.
    pub fn constrain_edge(&mut self, a: u32, b: u32) {
        self.constraints.push((a, b));
    }

    /// Constrains every edge of a closed loop of point indices.
    pub fn constrain_loop(&mut self, indices: &[u32]) {
        for k in 0..indices.len() {
            self.constrain_edge(indices[k], indices[(k + 1) % indices.len()]);
        }
    }

    /// Restricts the output to the inside of this closed loop
    /// (edges are constrained automatically).
    pub fn set_outer_loop(&mut self, indices: &[u32]) {
        self.constrain_loop(indices);
        self.outer = Some(indices.to_vec());
    }

    /// Marks a closed loop as a hole: triangles inside it are omitted
    /// (edges are constrained automatically).
    pub fn add_hole_loop(&mut self, indices: &[u32]) {
        self.constrain_loop(indices);
        self.holes.push(indices.to_vec());
    }

    pub fn triangulate(&self) -> Result<TriMesh> {
        let dups = find_duplicates(&self.points, 1e-9);
        if !dups.is_empty() {
            return Err(GeometryError::DuplicatePoints(dups));
        }
        let n = self.points.len() as u32;
        for &(a, b) in &self.constraints {
            for &v in &[a, b] {
                if v >= n {
                    return Err(GeometryError::ConstraintIndexOutOfBounds { index: v });
                }
            }
        }
        let mut tri = Triangulation::build(&self.points)?;
        let mut constrained: BTreeSet<(u32, u32)> = BTreeSet::new();
        for &(a, b) in &self.constraints {
            if a == b {
                continue;
            }
            recover_edge(&mut tri, a, b, &constrained)?;
            constrained.insert((a.min(b), a.max(b)));
        }
        let mesh = tri.into_mesh();
        let kept = self.classify(&mesh);
        let faces: Vec<[u32; 3]> = mesh
            .faces
            .iter()
            .zip(kept.iter())
            .filter(|(_, &k)| k)
            .map(|(f, _)| canonical_face(*f))
            .collect();
        let mut out = TriMesh::new(
            self.points.iter().map(|p| p3(p.x, p.y, 0.0)).collect(),
            faces,
        );
        if self.outer.is_some() || !self.holes.is_empty() {
            out.compact();
        }
        Ok(out)
    }

    /// Keep flags per face: inside the outer loop (when set) and outside
    /// every hole loop, judged at the centroid.
    fn classify(&self, mesh: &TriMesh) -> Vec<bool> {
        let loop_points = |ids: &[u32]| -> Vec<Point2> {
            ids.iter().map(|&i| self.points[i as usize]).collect()
        };
        let outer = self.outer.as_deref().map(loop_points);
        let holes: Vec<Vec<Point2>> = self.holes.iter().map(|h| loop_points(h)).collect();
        (0..mesh.faces.len())
            .map(|f| {
                let [a, b, c] = mesh.face_points_2d(f);
                let centroid = a.add(b).add(c).scale(1.0 / 3.0);
                if let Some(ref poly) = outer {
                    if !point_in_polygon(centroid, poly) {
                        return false;
                    }
                }
                !holes.iter().any(|h| point_in_polygon(centroid, h))
            })
            .collect()
    }
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn strictly_between(a: Point2, b: Point2, p: Point2) -> bool {
    let d = b.sub(a);
    let t = p.sub(a).dot(d) / d.dot(d);
    t > 1e-12 && t < 1.0 - 1e-12
}

/// Forces edge `(a, b)` into the triangulation by flipping every edge the
/// open segment crosses (Sloan's corridor method).
fn recover_edge(
    tri: &mut Triangulation,
    a: u32,
    b: u32,
    constrained: &BTreeSet<(u32, u32)>,
) -> Result<()> {
    if tri.edge_exists(a, b) {
        return Ok(());
    }
    let crossings = collect_crossings(tri, a, b, constrained)?;
    let mut queue: VecDeque<(u32, u32)> = crossings.into_iter().collect();
    let mut budget = 64 * (queue.len() + 4) * (queue.len() + 4);
    while let Some((u, w)) = queue.pop_front() {
        if budget == 0 {
            return Err(GeometryError::Internal(alloc::format!(
                "edge recovery for ({a}, {b}) did not converge"
            )));
        }
        budget -= 1;
        if !tri.edge_exists(u, w) {
            continue; // flipped away as a side effect
        }
        match tri.try_flip(u, w) {
            Some((x, y)) => {
                if (x, y) != (a, b) && (y, x) != (a, b) && segment_crosses(tri, a, b, x, y) {
                    queue.push_back((x, y));
                }
            }
            None => queue.push_back((u, w)), // non-convex quad, retry later
        }
    }
    if tri.edge_exists(a, b) {
        Ok(())
    } else {
        Err(GeometryError::Internal(alloc::format!(
            "constraint edge ({a}, {b}) could not be recovered"
        )))
    }
}

fn segment_crosses(tri: &Triangulation, a: u32, b: u32, u: u32, w: u32) -> bool {
    if u == a || u == b || w == a || w == b {
        return false;
    }
    let (pa, pb) = (tri.pts[a as usize], tri.pts[b as usize]);
    let (pu, pw) = (tri.pts[u as usize], tri.pts[w as usize]);
    let d1 = orient(pa, pb, pu);
    let d2 = orient(pa, pb, pw);
    let d3 = orient(pu, pw, pa);
    let d4 = orient(pu, pw, pb);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Walks the triangle corridor from `a` to `b`, listing every crossed edge.
fn collect_crossings(
    tri: &Triangulation,
    a: u32,
    b: u32,
    constrained: &BTreeSet<(u32, u32)>,
) -> Result<Vec<(u32, u32)>> {
    let pa = tri.pts[a as usize];
    let pb = tri.pts[b as usize];
    // Entry triangle: the fan triangle around `a` whose far edge the segment
    // exits through.
    let mut cur = None;
    for t in tri.fan(a) {
        let tr = &tri.tris[t as usize];
        if tr.is_ghost() {
            continue;
        }
        let k = tr.slot_of(a).expect("fan triangle contains a");
        let u = tr.v[(k + 1) % 3];
        let w = tr.v[(k + 2) % 3];
        let (pu, pw) = (tri.pts[u as usize], tri.pts[w as usize]);
        let ou = orient(pa, pb, pu);
        let ow = orient(pa, pb, pw);
        if ou == 0.0 && strictly_between(pa, pb, pu) {
            return Err(GeometryError::ConstraintThroughVertex { a, b, vertex: u });
        }
        if ow == 0.0 && strictly_between(pa, pb, pw) {
            return Err(GeometryError::ConstraintThroughVertex { a, b, vertex: w });
        }
        // In a CCW fan triangle (a, u, w) the segment leaves through the
        // far edge when u is strictly right and w strictly left of a -> b.
        if ou < 0.0 && ow > 0.0 && segment_crosses(tri, a, b, u, w) {
            cur = Some((t, u, w));
            break;
        }
    }
    let (mut t, mut u, mut w) = cur.ok_or_else(|| {
        GeometryError::Internal(alloc::format!(
            "no corridor entry for constraint ({a}, {b})"
        ))
    })?;
    let mut crossings = Vec::new();
    let mut guard = tri.tris.len() * 4 + 16;
    loop {
        if guard == 0 {
            return Err(GeometryError::Internal(alloc::format!(
                "corridor walk for ({a}, {b}) did not terminate"
            )));
        }
        guard -= 1;
        let key = (u.min(w), u.max(w));
        if constrained.contains(&key) {
            return Err(GeometryError::ConstraintsCross {
                first: (a, b),
                second: (u, w),
            });
        }
        crossings.push((u, w));
        // Step across (u, w).
        let tr = &tri.tris[t as usize];
        let k = (0..3)
            .find(|&j| {
                let (x, y) = (tr.v[(j + 1) % 3], tr.v[(j + 2) % 3]);
                (x == u && y == w) || (x == w && y == u)
            })
            .expect("current triangle carries the crossing edge");
        let s = tr.n[k];
        let st = &tri.tris[s as usize];
        let ks = st
            .slot_of(u)
            .and_then(|_| st.slot_of(w))
            .map(|_| {
                (0..3)
                    .find(|&j| st.v[j] != u && st.v[j] != w)
                    .expect("apex exists")
            })
            .ok_or_else(|| GeometryError::Internal(alloc::string::String::from("broken corridor")))?;
        let x = st.v[ks];
        if x == b {
            break;
        }
        let px = tri.pts[x as usize];
        let ox = orient(pa, pb, px);
        if ox == 0.0 {
            if strictly_between(pa, pb, px) {
                return Err(GeometryError::ConstraintThroughVertex { a, b, vertex: x });
            }
            return Err(GeometryError::Internal(alloc::format!(
                "degenerate corridor at vertex {x} for ({a}, {b})"
            )));
        }
        if ox > 0.0 {
            w = x; // apex on the left replaces the left end
        } else {
            u = x;
        }
        t = s;
    }
    Ok(crossings)
}

/// Convenience wrapper matching the unconstrained signature: triangulates
/// `points` with forced `edges`.
pub fn constrained_delaunay_2d(points: &[Point2], edges: &[(u32, u32)]) -> Result<TriMesh> {
    let mut prob = CdtProblem::new(points.to_vec());
    for &(a, b) in edges {
        prob.constrain_edge(a, b);
    }
    prob.triangulate()
}
