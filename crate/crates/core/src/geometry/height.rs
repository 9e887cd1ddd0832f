//! 2D nearest-neighbor height queries over scattered surface vertices,
//! backed by a kd-tree. Ties are broken toward the lowest vertex index so
//! queries are exactly reproducible.

use alloc::vec::Vec;

use super::{GeometryError, Result};
use crate::math::{Point2, Point3};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone)]
struct Node {
    /// Index into the entry array.
    entry: u32,
    left: i32,
    right: i32,
}

/// kd-tree over (x, y) with per-point heights.
#[derive(Debug, Clone)]
pub struct HeightIndex {
    entries: Vec<(Point2, f64, u32)>,
    nodes: Vec<Node>,
    root: i32,
}

impl HeightIndex {
    /// Builds the index from surface vertices (index order preserved for
    /// tie-breaking).
    pub fn build(vertices: &[Point3]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GeometryError::EmptyHeightIndex);
        }
        let entries: Vec<(Point2, f64, u32)> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.xy(), v.z, i as u32))
            .collect();
        let mut order: Vec<u32> = (0..entries.len() as u32).collect();
        let mut index = HeightIndex {
            entries,
            nodes: Vec::new(),
            root: -1,
        };
        index.root = index.split(&mut order, 0);
        Ok(index)
    }

    fn split(&mut self, order: &mut [u32], depth: usize) -> i32 {
        if order.is_empty() {
            return -1;
        }
        let axis = depth % 2;
        order.sort_unstable_by(|&a, &b| {
            let (pa, _, ia) = self.entries[a as usize];
            let (pb, _, ib) = self.entries[b as usize];
            let (ka, kb) = if axis == 0 { (pa.x, pb.x) } else { (pa.y, pb.y) };
            ka.total_cmp(&kb).then(ia.cmp(&ib))
        });
        let mid = order.len() / 2;
        let entry = order[mid];
        let (mut lo, mut hi) = order.split_at_mut(mid);
        hi = &mut hi[1..];
        let left = self.split(&mut lo, depth + 1);
        let right = self.split(&mut hi, depth + 1);
        self.nodes.push(Node { entry, left, right });
        self.nodes.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Height of the vertex nearest to `xy` (ties to the lowest index).
    pub fn nearest_height(&self, xy: Point2) -> f64 {
        self.nearest(xy).1
    }

    /// `(vertex index, height)` of the nearest vertex.
    pub fn nearest(&self, xy: Point2) -> (u32, f64) {
        let mut best = (f64::INFINITY, u32::MAX, 0.0);
        self.search(self.root, xy, 0, &mut best);
        (best.1, best.2)
    }

    fn search(&self, node: i32, q: Point2, depth: usize, best: &mut (f64, u32, f64)) {
        if node < 0 {
            return;
        }
        let n = &self.nodes[node as usize];
        let (p, z, idx) = self.entries[n.entry as usize];
        let d2 = q.dist2(p);
        if d2 < best.0 || (d2 == best.0 && idx < best.1) {
            *best = (d2, idx, z);
        }
        let axis = depth % 2;
        let diff = if axis == 0 { q.x - p.x } else { q.y - p.y };
        let (near, far) = if diff < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.search(near, q, depth + 1, best);
        if diff * diff <= best.0 {
            self.search(far, q, depth + 1, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{p2, p3};
    use rand::Rng;

    #[test]
    fn single_vertex() {
        let idx = HeightIndex::build(&[p3(0.0, 0.0, 0.3)]).unwrap();
        assert_eq!(idx.nearest_height(p2(5.0, 5.0)), 0.3);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            HeightIndex::build(&[]),
            Err(GeometryError::EmptyHeightIndex)
        ));
    }

    #[test]
    fn grid_nearest_node() {
        // z = 0.01 x over a 0.1 m grid; query (2.04, 0) snaps to x = 2.0.
        let mut verts = Vec::new();
        for i in 0..=40 {
            for j in 0..=10 {
                let x = i as f64 * 0.1;
                let y = j as f64 * 0.1;
                verts.push(p3(x, y, 0.01 * x));
            }
        }
        let idx = HeightIndex::build(&verts).unwrap();
        assert!((idx.nearest_height(p2(2.04, 0.0)) - 0.020).abs() < 1e-12);
    }

    #[test]
    fn matches_linear_scan_exactly() {
        let mut rng = crate::rng::seeded_rng(17);
        let verts: Vec<crate::math::Point3> = (0..10_000)
            .map(|_| {
                p3(
                    rng.random::<f64>() * 50.0,
                    rng.random::<f64>() * 50.0,
                    rng.random::<f64>(),
                )
            })
            .collect();
        let idx = HeightIndex::build(&verts).unwrap();
        for _ in 0..1000 {
            let q = p2(rng.random::<f64>() * 60.0 - 5.0, rng.random::<f64>() * 60.0 - 5.0);
            let (got_i, got_z) = idx.nearest(q);
            // Linear-scan oracle with the same tie rule.
            let mut best = (f64::INFINITY, u32::MAX, 0.0);
            for (i, v) in verts.iter().enumerate() {
                let d2 = q.dist2(v.xy());
                if d2 < best.0 || (d2 == best.0 && (i as u32) < best.1) {
                    best = (d2, i as u32, v.z);
                }
            }
            assert_eq!((got_i, got_z), (best.1, best.2));
        }
    }
}
