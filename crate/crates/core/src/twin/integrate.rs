//! Per-segment defect integration.
//!
//! For each placement: cut the hole, re-triangulate the annulus between the
//! hole loop and the defect's pseudo-height boundary (both as constraints),
//! append the transformed defect mesh and weld the shared boundary vertices.
//! Face provenance tags survive the whole pipeline for later disassembly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::cut::cut_hole;
use super::validate::same_point_set_2d;
use super::{Placement, Result, RoadSegment, TwinError, WELD_TOL};
use crate::geometry::{extract_boundary_loops, CdtProblem, GeometryError, TriMesh};
use crate::math::{Point2, Point3};
use crate::model::{DefectModel, SurfaceModel};

#[allow(unused_imports)]
use num_traits::Float;

/// Provenance of one face of an integrated segment mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FaceTag {
    Road,
    /// Placement index the face belongs to.
    Defect(u32),
}

/// A segment with all its defects integrated.
#[derive(Debug, Clone)]
pub struct IntegratedSegment {
    pub id: String,
    pub outer: Vec<Point2>,
    pub mesh: TriMesh,
    pub tags: Vec<FaceTag>,
    /// Placement index -> vertex ids (defect interior plus welded boundary).
    pub defect_vertices: BTreeMap<u32, BTreeSet<u32>>,
    /// Hosted placement indices, in integration order.
    pub hosted: Vec<u32>,
    /// Welded vertex pairs per placement.
    pub welded_pairs: BTreeMap<u32, usize>,
}

pub struct SegmentIntegrator {
    id: String,
    outer: Vec<Point2>,
    mesh: TriMesh,
    tags: Vec<FaceTag>,
    defect_vertices: BTreeMap<u32, BTreeSet<u32>>,
    hosted: Vec<u32>,
    centroids: BTreeMap<u32, Point2>,
    welded_pairs: BTreeMap<u32, usize>,
}

impl SegmentIntegrator {
    pub fn new(segment: &RoadSegment) -> Result<Self> {
        segment.validate()?;
        Ok(SegmentIntegrator {
            id: segment.id.clone(),
            outer: segment.outer.clone(),
            mesh: segment.mesh.clone(),
            tags: alloc::vec![FaceTag::Road; segment.mesh.faces.len()],
            defect_vertices: BTreeMap::new(),
            hosted: Vec::new(),
            centroids: BTreeMap::new(),
            welded_pairs: BTreeMap::new(),
        })
    }

    /// Cuts, stitches and welds one defect into the segment.
    pub fn integrate(&mut self, defect: &DefectModel, placement: &Placement) -> Result<()> {
        let boundary_tf: Vec<Point2> = defect
            .boundary_polygon_2d()
            .iter()
            .map(|&p| placement.apply_2d(p))
            .collect();
        let cut = cut_hole(&self.mesh, &boundary_tf)?;
        // The stitching loop is the boundary of the removed region. Taking it
        // from the removed-face submesh also covers cuts that reach the
        // segment outer boundary (the annulus then restores those edges).
        let mut removed_mesh = TriMesh::new(
            self.mesh.vertices.clone(),
            cut.removed_faces
                .iter()
                .map(|&f| self.mesh.faces[f as usize])
                .collect(),
        );
        removed_mesh.compact();
        let removed_loops = extract_boundary_loops(&removed_mesh)?;
        if removed_loops.len() != 1 {
            return Err(TwinError::HoleLoopNotFound {
                loops: removed_loops.len(),
            });
        }
        let hole_pts: Vec<Point2> = removed_loops[0].points_2d(&removed_mesh);
        let removed: BTreeSet<u32> = cut.removed_faces.iter().copied().collect();
        self.tags = self
            .tags
            .iter()
            .enumerate()
            .filter(|(f, _)| !removed.contains(&(*f as u32)))
            .map(|(_, t)| *t)
            .collect();
        for set in self.defect_vertices.values_mut() {
            *set = set
                .iter()
                .map(|&v| cut.vertex_map[v as usize])
                .filter(|&v| v != u32::MAX)
                .collect();
        }
        self.mesh = cut.mesh;
        // Annulus between the hole loop and the defect boundary.
        let mut points = hole_pts.clone();
        points.extend(boundary_tf.iter().copied());
        let mut prob = CdtProblem::new(points);
        let hole_ids: Vec<u32> = (0..hole_pts.len() as u32).collect();
        let defect_ids: Vec<u32> =
            (hole_pts.len() as u32..(hole_pts.len() + boundary_tf.len()) as u32).collect();
        prob.set_outer_loop(&hole_ids);
        prob.add_hole_loop(&defect_ids);
        let annulus = prob.triangulate()?;
        // Transformed defect mesh; boundary z is exactly zero, so the xy
        // transform reproduces `boundary_tf` bitwise.
        let defect_verts: Vec<Point3> = defect
            .mesh
            .vertices
            .iter()
            .map(|&v| placement.apply_3d(v))
            .collect();
        let base_n = self.mesh.vertices.len() as u32;
        let annulus_n = annulus.vertices.len() as u32;
        let defect_offset = base_n + annulus_n;
        let mut vertices = self.mesh.vertices.clone();
        vertices.extend(annulus.vertices.iter().copied());
        vertices.extend(defect_verts.iter().copied());
        let mut faces = self.mesh.faces.clone();
        let mut tags = self.tags.clone();
        for f in &annulus.faces {
            faces.push([f[0] + base_n, f[1] + base_n, f[2] + base_n]);
            tags.push(FaceTag::Road);
        }
        for f in &defect.mesh.faces {
            faces.push([
                f[0] + defect_offset,
                f[1] + defect_offset,
                f[2] + defect_offset,
            ]);
            tags.push(FaceTag::Defect(placement.index));
        }
        let (welded, map) = weld(&vertices, WELD_TOL);
        let mut new_faces = Vec::with_capacity(faces.len());
        for face in &faces {
            let f = [
                map[face[0] as usize],
                map[face[1] as usize],
                map[face[2] as usize],
            ];
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(TwinError::Geometry(GeometryError::Internal(
                    String::from("weld collapsed a face"),
                )));
            }
            new_faces.push(f);
        }
        // Every defect boundary vertex must have merged into pre-existing
        // geometry (the annulus carries identical coordinates).
        let boundary_global: Vec<u32> = defect
            .boundary
            .indices
            .iter()
            .map(|&i| i + defect_offset)
            .collect();
        let merged = boundary_global
            .iter()
            .filter(|&&g| {
                // Welded onto a vertex that existed before the defect block.
                vertices_origin_of(map[g as usize], &map, defect_offset)
            })
            .count();
        if merged != boundary_global.len() {
            return Err(TwinError::UnweldedBoundary {
                placement: placement.index,
                unmatched: boundary_global.len() - merged,
            });
        }
        // Remap existing bookkeeping and record the new defect's vertices.
        for set in self.defect_vertices.values_mut() {
            *set = set.iter().map(|&v| map[v as usize]).collect();
        }
        let defect_set: BTreeSet<u32> = (defect_offset..defect_offset + defect.mesh.vertices.len() as u32)
            .map(|g| map[g as usize])
            .collect();
        self.defect_vertices.insert(placement.index, defect_set);
        self.welded_pairs.insert(placement.index, merged);
        self.hosted.push(placement.index);
        self.centroids.insert(
            placement.index,
            centroid(&boundary_tf),
        );
        self.mesh = TriMesh::new(welded, new_faces);
        self.tags = tags;
        // Integration must close every loop except the segment outer.
        let loops = extract_boundary_loops(&self.mesh)?;
        if loops.len() != 1 {
            return Err(TwinError::BoundaryLoopMismatch {
                segment: self.id.clone(),
                loops: loops.len(),
            });
        }
        if !same_point_set_2d(&loops[0].points_2d(&self.mesh), &self.outer, 1e-9) {
            return Err(TwinError::SegmentPolygonMismatch {
                segment: self.id.clone(),
            });
        }
        Ok(())
    }

    /// Restores elevation: road vertices take the nearest surface height;
    /// each defect shifts rigidly by the height at its boundary centroid so
    /// its internal shape (and depth) is preserved and no seams open.
    pub fn restore_elevation(&mut self, surface: &SurfaceModel) {
        let mut owner: BTreeMap<u32, u32> = BTreeMap::new();
        for (&placement, set) in &self.defect_vertices {
            for &v in set {
                owner.insert(v, placement);
            }
        }
        let offsets: BTreeMap<u32, f64> = self
            .centroids
            .iter()
            .map(|(&i, &c)| (i, surface.nearest_height(c)))
            .collect();
        for (v, vertex) in self.mesh.vertices.iter_mut().enumerate() {
            match owner.get(&(v as u32)) {
                Some(placement) => vertex.z += offsets[placement],
                None => vertex.z = surface.nearest_height(vertex.xy()),
            }
        }
    }

    pub fn finish(self) -> Result<IntegratedSegment> {
        if self.tags.len() != self.mesh.faces.len() {
            return Err(TwinError::UntaggedFaces { segment: self.id });
        }
        Ok(IntegratedSegment {
            id: self.id,
            outer: self.outer,
            mesh: self.mesh,
            tags: self.tags,
            defect_vertices: self.defect_vertices,
            hosted: self.hosted,
            welded_pairs: self.welded_pairs,
        })
    }
}

fn vertices_origin_of(mapped: u32, map: &[u32], defect_offset: u32) -> bool {
    // A defect vertex merged into earlier geometry iff some pre-block vertex
    // maps to the same final id.
    map[..defect_offset as usize].contains(&mapped)
}

fn centroid(poly: &[Point2]) -> Point2 {
    poly.iter()
        .fold(Point2::ZERO, |acc, p| acc.add(*p))
        .scale(1.0 / poly.len() as f64)
}

/// Welds vertices within `tol`, keeping the lowest-index representative's
/// coordinates. Returns the new vertex list and the old -> new index map.
fn weld(vertices: &[Point3], tol: f64) -> (Vec<Point3>, Vec<u32>) {
    let n = vertices.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn root(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    fn union(parent: &mut [u32], a: u32, b: u32) {
        let (ra, rb) = (root(parent, a), root(parent, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi as usize] = lo;
        }
    }
    // Exact pass on bit patterns, then a tolerance sweep along x.
    let mut exact: BTreeMap<(u64, u64, u64), u32> = BTreeMap::new();
    for (i, v) in vertices.iter().enumerate() {
        let key = (v.x.to_bits(), v.y.to_bits(), v.z.to_bits());
        match exact.get(&key) {
            Some(&first) => union(&mut parent, first, i as u32),
            None => {
                exact.insert(key, i as u32);
            }
        }
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| vertices[a as usize].x.total_cmp(&vertices[b as usize].x));
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            let (a, b) = (order[i], order[j]);
            let (va, vb) = (vertices[a as usize], vertices[b as usize]);
            if vb.x - va.x > tol {
                break;
            }
            if va.dist(vb) <= tol {
                union(&mut parent, a, b);
            }
        }
    }
    let mut map = alloc::vec![u32::MAX; n];
    let mut out = Vec::new();
    for i in 0..n as u32 {
        if root(&mut parent, i) == i {
            map[i as usize] = out.len() as u32;
            out.push(vertices[i as usize]);
        }
    }
    for i in 0..n as u32 {
        let r = root(&mut parent, i);
        map[i as usize] = map[r as usize];
    }
    (out, map)
}
