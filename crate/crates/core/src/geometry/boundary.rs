//! Boundary-loop extraction.
//!
//! A boundary edge is an edge used by exactly one face; chains of boundary
//! edges delimit the outer perimeter and any holes of the surface.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{GeometryError, Result, TriMesh};
use crate::math::Point2;

/// Closed polyline of vertex indices (first connects back to last).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryLoop {
    pub indices: Vec<u32>,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn points_2d(&self, mesh: &TriMesh) -> Vec<Point2> {
        self.indices
            .iter()
            .map(|&i| mesh.vertices[i as usize].xy())
            .collect()
    }
}

/// Extracts all closed boundary loops of `mesh`.
///
/// Every edge used by exactly one face appears in exactly one loop; edges
/// shared by two faces appear in none. Loops follow the winding of their
/// owning faces. Edges used by three or more faces are an error.
pub fn extract_boundary_loops(mesh: &TriMesh) -> Result<Vec<BoundaryLoop>> {
    // Count undirected uses; keep the directed form for the walk so loop
    // orientation matches face winding.
    let mut undirected: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut directed: BTreeMap<(u32, u32), ()> = BTreeMap::new();
    for face in &mesh.faces {
        for k in 0..3 {
            let a = face[k];
            let b = face[(k + 1) % 3];
            *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            directed.insert((a, b), ());
        }
    }
    for (&(a, b), &count) in &undirected {
        if count > 2 {
            return Err(GeometryError::NonManifoldEdge { a, b, count });
        }
    }
    // A boundary edge's directed form appears in exactly one face; walk
    // tail -> head. Two outgoing boundary edges from one vertex means a
    // pinched (non-manifold) vertex, reported as an open chain.
    let mut next: BTreeMap<u32, u32> = BTreeMap::new();
    for (&(lo, hi), &count) in &undirected {
        if count != 1 {
            continue;
        }
        let (a, b) = if directed.contains_key(&(lo, hi)) {
            (lo, hi)
        } else {
            (hi, lo)
        };
        if next.insert(a, b).is_some() {
            return Err(GeometryError::OpenBoundaryChain { vertex: a });
        }
    }
    let mut loops = Vec::new();
    let mut visited: BTreeMap<u32, bool> = BTreeMap::new();
    let starts: Vec<u32> = next.keys().copied().collect();
    for start in starts {
        if visited.contains_key(&start) {
            continue;
        }
        let mut indices = Vec::new();
        let mut cur = start;
        loop {
            if visited.insert(cur, true).is_some() {
                return Err(GeometryError::OpenBoundaryChain { vertex: cur });
            }
            indices.push(cur);
            match next.get(&cur) {
                Some(&n) => cur = n,
                None => return Err(GeometryError::OpenBoundaryChain { vertex: cur }),
            }
            if cur == start {
                break;
            }
        }
        loops.push(BoundaryLoop { indices });
    }
    Ok(loops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p3;

    #[test]
    fn single_triangle_one_loop_of_three() {
        let m = TriMesh::new(
            alloc::vec![p3(0.0, 0.0, 0.0), p3(1.0, 0.0, 0.0), p3(0.0, 1.0, 0.0)],
            alloc::vec![[0, 1, 2]],
        );
        let loops = extract_boundary_loops(&m).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 3);
    }

    #[test]
    fn closed_tetrahedron_has_no_boundary() {
        let m = TriMesh::new(
            alloc::vec![
                p3(0.0, 0.0, 0.0),
                p3(1.0, 0.0, 0.0),
                p3(0.0, 1.0, 0.0),
                p3(0.0, 0.0, 1.0),
            ],
            alloc::vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]],
        );
        assert!(extract_boundary_loops(&m).unwrap().is_empty());
    }

    #[test]
    fn two_triangles_share_edge_one_loop_of_four() {
        let m = TriMesh::new(
            alloc::vec![
                p3(0.0, 0.0, 0.0),
                p3(1.0, 0.0, 0.0),
                p3(1.0, 1.0, 0.0),
                p3(0.0, 1.0, 0.0),
            ],
            alloc::vec![[0, 1, 2], [0, 2, 3]],
        );
        let loops = extract_boundary_loops(&m).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 4);
    }

    #[test]
    fn non_manifold_edge_reported() {
        let m = TriMesh::new(
            alloc::vec![
                p3(0.0, 0.0, 0.0),
                p3(1.0, 0.0, 0.0),
                p3(0.0, 1.0, 0.0),
                p3(0.0, 0.0, 1.0),
                p3(1.0, 1.0, 1.0),
            ],
            alloc::vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]],
        );
        assert!(matches!(
            extract_boundary_loops(&m),
            Err(GeometryError::NonManifoldEdge { a: 0, b: 1, count: 3 })
        ));
    }

    #[test]
    fn euler_consistency_on_strip() {
        // Strip of 4 triangles: one loop; boundary edge count equals the
        // number of once-used edges.
        let m = TriMesh::new(
            alloc::vec![
                p3(0.0, 0.0, 0.0),
                p3(1.0, 0.0, 0.0),
                p3(2.0, 0.0, 0.0),
                p3(0.0, 1.0, 0.0),
                p3(1.0, 1.0, 0.0),
                p3(2.0, 1.0, 0.0),
            ],
            alloc::vec![[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]],
        );
        let loops = extract_boundary_loops(&m).unwrap();
        let once: usize = m
            .edge_use_counts()
            .values()
            .filter(|&&c| c == 1)
            .count();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), once);
    }
}
