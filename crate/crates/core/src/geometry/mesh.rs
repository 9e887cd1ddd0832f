//! Indexed triangle mesh, the common currency of all geometry stages.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{GeometryError, Result};
use crate::math::{Point2, Point3};

#[allow(unused_imports)]
use num_traits::Float;

/// Indexed triangle mesh in meters.
///
/// Invariants (checked by [`TriMesh::validate`]):
/// - every face index is in bounds,
/// - no face repeats a vertex index,
/// - no two faces share the same unordered index triple,
/// - every vertex is referenced by at least one face,
/// - all coordinates are finite.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[u32; 3]>) -> Self {
        TriMesh { vertices, faces }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face_points(&self, face: usize) -> [Point3; 3] {
        let [a, b, c] = self.faces[face];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn face_points_2d(&self, face: usize) -> [Point2; 3] {
        let [a, b, c] = self.face_points(face);
        [a.xy(), b.xy(), c.xy()]
    }

    /// 3D area of one face.
    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.face_points(face);
        b.sub(a).cross(c.sub(a)).norm() * 0.5
    }

    /// Signed area of the face projected onto the horizontal plane.
    pub fn face_area_2d(&self, face: usize) -> f64 {
        let [a, b, c] = self.face_points_2d(face);
        b.sub(a).cross(c.sub(a)) * 0.5
    }

    /// Total unsigned 2D projected area.
    pub fn area_2d(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area_2d(f).abs()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeometryError::NonFiniteVertex { vertex: i as u32 });
            }
        }
        let mut referenced = alloc::vec![false; n];
        let mut seen: BTreeMap<[u32; 3], usize> = BTreeMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                if v as usize >= n {
                    return Err(GeometryError::FaceIndexOutOfBounds {
                        face: f,
                        vertex: v,
                        vertices: n,
                    });
                }
                referenced[v as usize] = true;
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(GeometryError::DegenerateFaceIndices { face: f });
            }
            let mut key = *face;
            key.sort_unstable();
            if let Some(&first) = seen.get(&key) {
                return Err(GeometryError::DuplicateFace { first, second: f });
            }
            seen.insert(key, f);
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return Err(GeometryError::UnreferencedVertex { vertex: v as u32 });
        }
        Ok(())
    }

    /// Drops unreferenced vertices, remapping face indices while keeping the
    /// relative vertex order. Returns the old-index -> new-index map
    /// (`u32::MAX` for dropped vertices).
    pub fn compact(&mut self) -> Vec<u32> {
        let mut referenced = alloc::vec![false; self.vertices.len()];
        for face in &self.faces {
            for &v in face {
                referenced[v as usize] = true;
            }
        }
        let mut map = alloc::vec![u32::MAX; self.vertices.len()];
        let mut kept = Vec::new();
        for (i, &r) in referenced.iter().enumerate() {
            if r {
                map[i] = kept.len() as u32;
                kept.push(self.vertices[i]);
            }
        }
        for face in &mut self.faces {
            for v in face.iter_mut() {
                *v = map[*v as usize];
            }
        }
        self.vertices = kept;
        map
    }

    /// Iterates unordered edges with their face usage counts.
    pub fn edge_use_counts(&self) -> BTreeMap<(u32, u32), usize> {
        let mut counts = BTreeMap::new();
        for face in &self.faces {
            for k in 0..3 {
                let a = face[k];
                let b = face[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p3;

    fn quad() -> TriMesh {
        TriMesh::new(
            alloc::vec![
                p3(0.0, 0.0, 0.0),
                p3(1.0, 0.0, 0.0),
                p3(1.0, 1.0, 0.0),
                p3(0.0, 1.0, 0.0),
            ],
            alloc::vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn valid_quad_passes() {
        quad().validate().unwrap();
        assert!((quad().area_2d() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_face_rejected() {
        let mut m = quad();
        m.faces.push([0, 1, 9]);
        assert!(matches!(
            m.validate(),
            Err(GeometryError::FaceIndexOutOfBounds { vertex: 9, .. })
        ));
    }

    #[test]
    fn duplicate_face_rejected() {
        let mut m = quad();
        m.faces.push([2, 0, 1]);
        assert!(matches!(m.validate(), Err(GeometryError::DuplicateFace { .. })));
    }

    #[test]
    fn unreferenced_vertex_rejected_and_compacted() {
        let mut m = quad();
        m.vertices.push(p3(5.0, 5.0, 5.0));
        assert!(matches!(
            m.validate(),
            Err(GeometryError::UnreferencedVertex { vertex: 4 })
        ));
        m.compact();
        m.validate().unwrap();
        assert_eq!(m.vertices.len(), 4);
    }
}
