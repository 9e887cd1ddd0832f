//! Incremental Delaunay triangulation (Bowyer-Watson insertion with ghost
//! triangles closing the hull, point location by walking).
//!
//! Ghost triangles carry [`GHOST`] as their third vertex and stand in for
//! the unbounded region beyond each hull edge, so cavity search and fan
//! walks need no hull special cases.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{GeometryError, Result, TriMesh};
use crate::math::{p3, Point2};

#[allow(unused_imports)]
use num_traits::Float;

pub(super) const GHOST: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub(super) struct Tri {
    /// Vertex indices, counterclockwise; ghosts keep `GHOST` in slot 2.
    pub v: [u32; 3],
    /// `n[k]` is the neighbor across the edge opposite `v[k]`.
    pub n: [u32; 3],
}

impl Tri {
    pub(super) fn edge(&self, k: usize) -> (u32, u32) {
        (self.v[(k + 1) % 3], self.v[(k + 2) % 3])
    }

    pub(super) fn slot_of(&self, vertex: u32) -> Option<usize> {
        self.v.iter().position(|&x| x == vertex)
    }

    pub fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// `> 0` iff `d` lies strictly inside the circumcircle of CCW `(a, b, c)`.
fn in_circle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    let (ax, ay) = (a.x - d.x, a.y - d.y);
    let (bx, by) = (b.x - d.x, b.y - d.y);
    let (cx, cy) = (c.x - d.x, c.y - d.y);
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx)
}

pub(super) struct Triangulation {
    pub pts: Vec<Point2>,
    pub tris: Vec<Tri>,
    pub alive: Vec<bool>,
    free: Vec<u32>,
    /// One alive triangle incident to each vertex.
    vert_tri: Vec<u32>,
    last: u32,
}

impl Triangulation {
    /// Builds the Delaunay triangulation of `points`. Points are inserted in
    /// input order; the caller must have rejected duplicates already.
    pub fn build(points: &[Point2]) -> Result<Self> {
        if points.len() < 3 {
            return Err(GeometryError::TooFewPoints {
                count: points.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFiniteVertex { vertex: i as u32 });
            }
        }
        // Bootstrap from the first non-collinear triple.
        let (i0, i1) = (0u32, 1u32);
        let mut i2 = None;
        for k in 2..points.len() {
            if orient(points[0], points[1], points[k]) != 0.0 {
                i2 = Some(k as u32);
                break;
            }
        }
        let i2 = i2.ok_or(GeometryError::CollinearPoints)?;
        let mut t = Triangulation {
            pts: points.to_vec(),
            tris: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            vert_tri: alloc::vec![u32::MAX; points.len()],
            last: 0,
        };
        t.bootstrap(i0, i1, i2);
        for k in 2..points.len() as u32 {
            if k == i2 {
                continue;
            }
            t.insert(k)?;
        }
        Ok(t)
    }

    fn bootstrap(&mut self, i0: u32, i1: u32, i2: u32) {
        let (a, b, c) = if orient(self.pts[i0 as usize], self.pts[i1 as usize], self.pts[i2 as usize])
            > 0.0
        {
            (i0, i1, i2)
        } else {
            (i0, i2, i1)
        };
        // Real triangle plus one ghost per hull edge.
        let real = self.alloc(Tri { v: [a, b, c], n: [0; 3] });
        let g0 = self.alloc(Tri { v: [c, b, GHOST], n: [0; 3] });
        let g1 = self.alloc(Tri { v: [a, c, GHOST], n: [0; 3] });
        let g2 = self.alloc(Tri { v: [b, a, GHOST], n: [0; 3] });
        self.wire_group(&[real, g0, g1, g2], &BTreeMap::new());
        self.last = real;
    }

    fn alloc(&mut self, tri: Tri) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tris[id as usize] = tri;
            self.alive[id as usize] = true;
            self.touch_verts(id);
            id
        } else {
            let id = self.tris.len() as u32;
            self.tris.push(tri);
            self.alive.push(true);
            self.touch_verts(id);
            id
        }
    }

    fn touch_verts(&mut self, id: u32) {
        for &v in &self.tris[id as usize].v {
            if v != GHOST {
                self.vert_tri[v as usize] = id;
            }
        }
    }

    /// Wires neighbor pointers among `group` and to recorded outside
    /// triangles (`outside`: directed edge -> triangle known to sit across).
    fn wire_group(&mut self, group: &[u32], outside: &BTreeMap<(u32, u32), u32>) {
        let mut dir: BTreeMap<(u32, u32), (u32, usize)> = BTreeMap::new();
        for &t in group {
            for k in 0..3 {
                dir.insert(self.tris[t as usize].edge(k), (t, k));
            }
        }
        for &t in group {
            for k in 0..3 {
                let (u, w) = self.tris[t as usize].edge(k);
                if let Some(&(s, _)) = dir.get(&(w, u)) {
                    self.tris[t as usize].n[k] = s;
                } else if let Some(&o) = outside.get(&(u, w)) {
                    self.tris[t as usize].n[k] = o;
                    let slot = (0..3)
                        .find(|&j| self.tris[o as usize].edge(j) == (w, u))
                        .expect("outside triangle must share the reversed edge");
                    self.tris[o as usize].n[slot] = t;
                }
            }
        }
    }

    /// True if inserting `p` must consume triangle `t` (circumcircle test for
    /// real triangles, hull-edge visibility for ghosts).
    fn eats(&self, t: u32, p: Point2) -> bool {
        let tri = &self.tris[t as usize];
        if tri.is_ghost() {
            let a = self.pts[tri.v[0] as usize];
            let b = self.pts[tri.v[1] as usize];
            let o = orient(a, b, p);
            if o > 0.0 {
                return true;
            }
            if o == 0.0 {
                // Collinear with the hull edge: eat when on the closed segment
                // so the edge splits instead of leaving a sliver.
                return p.x >= a.x.min(b.x)
                    && p.x <= a.x.max(b.x)
                    && p.y >= a.y.min(b.y)
                    && p.y <= a.y.max(b.y);
            }
            false
        } else {
            let a = self.pts[tri.v[0] as usize];
            let b = self.pts[tri.v[1] as usize];
            let c = self.pts[tri.v[2] as usize];
            in_circle(a, b, c, p) > 0.0
        }
    }

    /// Walks from the last created triangle toward `p`; returns a triangle
    /// containing it (or a ghost if `p` is outside the hull).
    fn locate(&self, p: Point2) -> u32 {
        let mut t = self.last;
        if !self.alive[t as usize] {
            t = self.any_alive_real();
        }
        if self.tris[t as usize].is_ghost() {
            t = self.tris[t as usize].n[2];
        }
        let cap = 4 * self.tris.len() + 16;
        let mut steps = 0;
        'walk: loop {
            steps += 1;
            if steps > cap {
                break;
            }
            let tri = &self.tris[t as usize];
            if tri.is_ghost() {
                return t;
            }
            for k in 0..3 {
                let (u, w) = tri.edge(k);
                if orient(self.pts[u as usize], self.pts[w as usize], p) < 0.0 {
                    t = tri.n[k];
                    continue 'walk;
                }
            }
            return t;
        }
        // Walk cap exceeded (possible only under severe degeneracy): scan.
        for (id, tri) in self.tris.iter().enumerate() {
            if !self.alive[id] || tri.is_ghost() {
                continue;
            }
            let a = self.pts[tri.v[0] as usize];
            let b = self.pts[tri.v[1] as usize];
            let c = self.pts[tri.v[2] as usize];
            if orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0 {
                return id as u32;
            }
        }
        for (id, tri) in self.tris.iter().enumerate() {
            if self.alive[id] && tri.is_ghost() && self.eats(id as u32, p) {
                return id as u32;
            }
        }
        self.any_alive_real()
    }

    fn any_alive_real(&self) -> u32 {
        self.tris
            .iter()
            .enumerate()
            .find(|(id, t)| self.alive[*id] && !t.is_ghost())
            .map(|(id, _)| id as u32)
            .expect("triangulation always keeps at least one real triangle")
    }

    /// Bowyer-Watson insertion of point index `pi`.
    fn insert(&mut self, pi: u32) -> Result<()> {
        let p = self.pts[pi as usize];
        let seed = self.locate(p);
        // Grow the cavity across edges whose far triangle also eats p.
        let mut cavity: Vec<u32> = alloc::vec![seed];
        let mut in_cavity: BTreeMap<u32, ()> = BTreeMap::new();
        in_cavity.insert(seed, ());
        let mut stack = alloc::vec![seed];
        while let Some(t) = stack.pop() {
            for k in 0..3 {
                let nb = self.tris[t as usize].n[k];
                if !in_cavity.contains_key(&nb) && self.eats(nb, p) {
                    in_cavity.insert(nb, ());
                    cavity.push(nb);
                    stack.push(nb);
                }
            }
        }
        // Boundary fence: directed edges owned by cavity triangles whose far
        // side survives.
        let mut fence: Vec<((u32, u32), u32)> = Vec::new();
        for &t in &cavity {
            for k in 0..3 {
                let nb = self.tris[t as usize].n[k];
                if !in_cavity.contains_key(&nb) {
                    fence.push((self.tris[t as usize].edge(k), nb));
                }
            }
        }
        if fence.is_empty() {
            return Err(GeometryError::Internal(alloc::format!(
                "empty insertion fence for point {pi}"
            )));
        }
        for &t in &cavity {
            self.alive[t as usize] = false;
            self.free.push(t);
        }
        let mut outside: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut group = Vec::with_capacity(fence.len());
        for &((u, w), nb) in &fence {
            outside.insert((u, w), nb);
            // New triangle (u, w, pi), rotated so a ghost slot stays at 2.
            let v = if u == GHOST {
                [w, pi, GHOST]
            } else if w == GHOST {
                [pi, u, GHOST]
            } else {
                [u, w, pi]
            };
            group.push(self.alloc(Tri { v, n: [0; 3] }));
        }
        self.wire_group(&group, &outside);
        self.last = group[0];
        Ok(())
    }

    /// One alive triangle having `v` as a vertex.
    pub fn tri_of_vertex(&self, v: u32) -> u32 {
        let t = self.vert_tri[v as usize];
        if t != u32::MAX && self.alive[t as usize] && self.tris[t as usize].slot_of(v).is_some() {
            return t;
        }
        // Stale hint; rescan (rare).
        self.tris
            .iter()
            .enumerate()
            .find(|(id, t)| self.alive[*id] && t.slot_of(v).is_some())
            .map(|(id, _)| id as u32)
            .expect("vertex must belong to an alive triangle")
    }

    /// All alive triangles around vertex `v`, in rotation order.
    pub fn fan(&self, v: u32) -> Vec<u32> {
        let start = self.tri_of_vertex(v);
        let mut out = Vec::new();
        let mut t = start;
        loop {
            out.push(t);
            let k = self.tris[t as usize].slot_of(v).expect("fan keeps v");
            t = self.tris[t as usize].n[(k + 2) % 3];
            if t == start || out.len() > self.tris.len() + 1 {
                break;
            }
        }
        out
    }

    /// Looks up the triangle/slot pair carrying directed edge `(a, b)`.
    pub fn find_directed_edge(&self, a: u32, b: u32) -> Option<(u32, usize)> {
        for t in self.fan(a) {
            for k in 0..3 {
                let (u, w) = self.tris[t as usize].edge(k);
                if u == a && w == b {
                    return Some((t, k));
                }
            }
        }
        None
    }

    pub fn edge_exists(&self, a: u32, b: u32) -> bool {
        self.find_directed_edge(a, b).is_some() || self.find_directed_edge(b, a).is_some()
    }

    /// Flips the interior edge `(u, w)`. Returns the replacing edge, or
    /// `None` when the surrounding quad is not strictly convex (flip would
    /// invert a triangle).
    pub fn try_flip(&mut self, u: u32, w: u32) -> Option<(u32, u32)> {
        let (t_id, k_t) = self.find_directed_edge(u, w)?;
        let s_id = self.tris[t_id as usize].n[k_t];
        let t = self.tris[t_id as usize];
        let s = self.tris[s_id as usize];
        if t.is_ghost() || s.is_ghost() {
            return None;
        }
        let apex_t = t.v[k_t];
        let k_s = (0..3).find(|&j| s.edge(j) == (w, u))?;
        let apex_s = s.v[k_s];
        let (pa, pb) = (self.pts[apex_t as usize], self.pts[apex_s as usize]);
        let (pu, pw) = (self.pts[u as usize], self.pts[w as usize]);
        // Quad (apex_t, u, apex_s, w) must be strictly convex.
        if orient(pa, pu, pb) <= 0.0 || orient(pb, pw, pa) <= 0.0 {
            return None;
        }
        // Neighbors around the quad.
        let c = t.n[(k_t + 1) % 3]; // across (w, apex_t)
        let d = t.n[(k_t + 2) % 3]; // across (apex_t, u)
        let e = s.n[(k_s + 1) % 3]; // across (u, apex_s)
        let f = s.n[(k_s + 2) % 3]; // across (apex_s, w)
        self.tris[t_id as usize] = Tri {
            v: [apex_t, u, apex_s],
            n: [e, s_id, d],
        };
        self.tris[s_id as usize] = Tri {
            v: [apex_t, apex_s, w],
            n: [f, c, t_id],
        };
        // C now borders S' and E now borders T'; D and F are unchanged.
        for j in 0..3 {
            if self.tris[c as usize].n[j] == t_id {
                self.tris[c as usize].n[j] = s_id;
            }
            if self.tris[e as usize].n[j] == s_id {
                self.tris[e as usize].n[j] = t_id;
            }
        }
        self.touch_verts(t_id);
        self.touch_verts(s_id);
        Some((apex_t, apex_s))
    }

    /// Emits the real triangles as a z=0 mesh over the original point order.
    pub fn into_mesh(&self) -> TriMesh {
        let mut faces: Vec<[u32; 3]> = self
            .tris
            .iter()
            .enumerate()
            .filter(|(id, t)| self.alive[*id] && !t.is_ghost())
            .map(|(_, t)| canonical_face(t.v))
            .collect();
        faces.sort_unstable();
        TriMesh::new(
            self.pts.iter().map(|p| p3(p.x, p.y, 0.0)).collect(),
            faces,
        )
    }
}

/// Rotates a face so the smallest index leads, preserving orientation.
pub(super) fn canonical_face(v: [u32; 3]) -> [u32; 3] {
    let k = (0..3).min_by_key(|&k| v[k]).unwrap();
    [v[k], v[(k + 1) % 3], v[(k + 2) % 3]]
}

/// Reports index pairs closer than `tol` (Euclidean).
pub(super) fn find_duplicates(points: &[Point2], tol: f64) -> Vec<(u32, u32)> {
    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        points[a as usize]
            .x
            .total_cmp(&points[b as usize].x)
            .then(points[a as usize].y.total_cmp(&points[b as usize].y))
    });
    let mut dups = Vec::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            let (a, b) = (order[i], order[j]);
            if points[b as usize].x - points[a as usize].x > tol {
                break;
            }
            if points[a as usize].dist(points[b as usize]) < tol {
                dups.push((a.min(b), a.max(b)));
            }
        }
    }
    dups.sort_unstable();
    dups
}

/// Delaunay triangulation of a 2D point set.
///
/// The output mesh keeps the input points (z = 0) in their original order;
/// the triangulation covers the convex hull and every interior triangle
/// satisfies the empty-circumcircle property.
pub fn delaunay_2d(points: &[Point2]) -> Result<TriMesh> {
    let dups = find_duplicates(points, 1e-9);
    if !dups.is_empty() {
        return Err(GeometryError::DuplicatePoints(dups));
    }
    Ok(Triangulation::build(points)?.into_mesh())
}
