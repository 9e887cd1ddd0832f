//! Scene validation: boundary topology, face isolation, degeneracy and
//! inter-asset overlap checks for physical simulation readiness.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::scene::{defect_asset_id, SceneAssets};
use crate::geometry::{extract_boundary_loops, point_strictly_in_triangle, TriMesh};
use crate::math::Point2;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub asset: String,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, asset: &str, check: &str, pass: bool, detail: String) {
        self.checks.push(CheckResult {
            asset: String::from(asset),
            check: String::from(check),
            pass,
            detail,
        });
    }
}

/// True when two 2D point sets agree within `tol` per coordinate.
pub fn same_point_set_2d(a: &[Point2], b: &[Point2], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    let key = |p: &Point2, q: &Point2| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y));
    sa.sort_by(|p, q| key(p, q));
    sb.sort_by(|p, q| key(p, q));
    sa.iter()
        .zip(sb.iter())
        .all(|(p, q)| (p.x - q.x).abs() <= tol && (p.y - q.y).abs() <= tol)
}

fn vertex_bits(mesh: &TriMesh) -> BTreeSet<(u64, u64, u64)> {
    mesh.vertices
        .iter()
        .map(|v| (v.x.to_bits(), v.y.to_bits(), v.z.to_bits()))
        .collect()
}

/// Single edge-connected component check.
fn single_component(mesh: &TriMesh) -> bool {
    if mesh.faces.is_empty() {
        return true;
    }
    let mut edge_to_faces: alloc::collections::BTreeMap<(u32, u32), Vec<u32>> =
        alloc::collections::BTreeMap::new();
    for (f, face) in mesh.faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (face[k], face[(k + 1) % 3]);
            edge_to_faces
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push(f as u32);
        }
    }
    let mut seen = alloc::vec![false; mesh.faces.len()];
    let mut stack = alloc::vec![0u32];
    seen[0] = true;
    let mut count = 1;
    while let Some(f) = stack.pop() {
        let face = mesh.faces[f as usize];
        for k in 0..3 {
            let (a, b) = (face[k], face[(k + 1) % 3]);
            for &nb in &edge_to_faces[&(a.min(b), a.max(b))] {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
    }
    count == mesh.faces.len()
}

fn bbox_2d(mesh: &TriMesh) -> (Point2, Point2) {
    let mut min = crate::math::p2(f64::INFINITY, f64::INFINITY);
    let mut max = crate::math::p2(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in &mesh.vertices {
        min = crate::math::p2(min.x.min(v.x), min.y.min(v.y));
        max = crate::math::p2(max.x.max(v.x), max.y.max(v.y));
    }
    (min, max)
}

/// Validates a generated scene. The report carries one entry per check;
/// the scene passes iff every check passes.
pub fn validate_scene(assets: &SceneAssets) -> ValidationReport {
    let mut report = ValidationReport::default();
    let manifest = &assets.manifest;
    report.push(
        "scene",
        "defect_asset_count",
        assets.defects.len() == manifest.placements.len(),
        format!(
            "{} assets / {} placements",
            assets.defects.len(),
            manifest.placements.len()
        ),
    );
    // Per-asset topology and quality checks.
    for (id, mesh) in assets.roads.iter().chain(assets.defects.iter()) {
        match mesh.validate() {
            Ok(()) => report.push(id, "mesh_valid", true, String::new()),
            Err(e) => report.push(id, "mesh_valid", false, format!("{e}")),
        }
        report.push(
            id,
            "single_component",
            single_component(mesh),
            String::new(),
        );
        let degenerate = (0..mesh.faces.len())
            .filter(|&f| mesh.face_area(f) < 1e-12)
            .count();
        report.push(
            id,
            "no_degenerate_faces",
            degenerate == 0,
            format!("{degenerate} faces below 1e-12 m^2"),
        );
    }
    // Road assets: loop count = 1 (outer) + hosted defects; outer loop
    // matches the segment polygon.
    for record in &manifest.segments {
        let Some((_, road)) = assets.roads.iter().find(|(id, _)| *id == record.id) else {
            report.push(&record.id, "road_asset_present", false, String::new());
            continue;
        };
        match extract_boundary_loops(road) {
            Ok(loops) => {
                let expected = 1 + record.hosted.len();
                report.push(
                    &record.id,
                    "boundary_loop_count",
                    loops.len() == expected,
                    format!("{} loops, expected {expected}", loops.len()),
                );
                let outer_ok = loops
                    .iter()
                    .any(|l| same_point_set_2d(&l.points_2d(road), &record.outer, 1e-9));
                report.push(&record.id, "outer_loop_matches_polygon", outer_ok, String::new());
            }
            Err(e) => report.push(&record.id, "boundary_loop_count", false, format!("{e}")),
        }
    }
    // Defect assets: one loop, coincident (bitwise) with host road vertices.
    for placement in &manifest.placements {
        let id = defect_asset_id(placement.index);
        let Some((_, mesh)) = assets.defects.iter().find(|(d, _)| *d == id) else {
            report.push(&id, "defect_asset_present", false, String::new());
            continue;
        };
        let host = manifest
            .segments
            .iter()
            .find(|s| s.hosted.contains(&placement.index))
            .map(|s| s.id.as_str());
        let Some(host) = host else {
            report.push(&id, "host_segment_known", false, String::new());
            continue;
        };
        let Some((_, road)) = assets.roads.iter().find(|(r, _)| r == host) else {
            report.push(&id, "host_road_present", false, String::new());
            continue;
        };
        match extract_boundary_loops(mesh) {
            Ok(loops) => {
                report.push(
                    &id,
                    "single_boundary_loop",
                    loops.len() == 1,
                    format!("{} loops", loops.len()),
                );
                if let Some(l) = loops.first() {
                    let road_bits = vertex_bits(road);
                    let missing = l
                        .indices
                        .iter()
                        .filter(|&&i| {
                            let v = mesh.vertices[i as usize];
                            !road_bits.contains(&(v.x.to_bits(), v.y.to_bits(), v.z.to_bits()))
                        })
                        .count();
                    report.push(
                        &id,
                        "boundary_coincides_with_host",
                        missing == 0,
                        format!("{missing} boundary vertices missing from host"),
                    );
                }
            }
            Err(e) => report.push(&id, "single_boundary_loop", false, format!("{e}")),
        }
    }
    // Sampled inter-asset overlap: no face centroid of one asset strictly
    // inside a face of another (shared boundaries are allowed).
    let all: Vec<(&String, &TriMesh)> = assets
        .roads
        .iter()
        .chain(assets.defects.iter())
        .map(|(id, m)| (id, m))
        .collect();
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i == j {
                continue;
            }
            let (ida, ma) = all[i];
            let (_, mb) = all[j];
            let (amin, amax) = bbox_2d(ma);
            let (bmin, bmax) = bbox_2d(mb);
            if amax.x < bmin.x || bmax.x < amin.x || amax.y < bmin.y || bmax.y < amin.y {
                continue;
            }
            let mut overlaps = 0;
            for f in 0..ma.faces.len() {
                let [a, b, c] = ma.face_points_2d(f);
                let centroid = a.add(b).add(c).scale(1.0 / 3.0);
                for g in 0..mb.faces.len() {
                    if point_strictly_in_triangle(centroid, &mb.face_points_2d(g), 1e-9) {
                        overlaps += 1;
                        break;
                    }
                }
            }
            if overlaps > 0 {
                report.push(
                    ida,
                    "no_inter_asset_overlap",
                    false,
                    format!("{overlaps} face centroids inside other assets"),
                );
            }
        }
    }
    report.push(
        "scene",
        "no_inter_asset_overlap",
        !report.checks.iter().any(|c| c.check == "no_inter_asset_overlap" && !c.pass),
        String::new(),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{p2, p3};
    use crate::twin::placement::tests::test_library;
    use crate::twin::{generate_scene, RoadSegment, SceneConfig};

    fn scene() -> SceneAssets {
        let segments = alloc::vec![RoadSegment::planar(
            "r0",
            &[p2(0.0, 0.0), p2(12.0, 0.0), p2(12.0, 8.0), p2(0.0, 8.0)],
            2.0,
        )
        .unwrap()];
        let lib = test_library();
        let config = SceneConfig {
            count: 3,
            master_seed: 21,
            validate: false,
            ..Default::default()
        };
        generate_scene(&segments, &lib, None, &config).unwrap()
    }

    #[test]
    fn valid_scene_passes() {
        let report = validate_scene(&scene());
        assert!(report.passes(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn deleted_face_fails_loop_count() {
        let mut assets = scene();
        // Delete an interior face from the road asset.
        let (_, road) = &mut assets.roads[0];
        let interior = (0..road.faces.len())
            .find(|&f| {
                let pts = road.face_points_2d(f);
                pts.iter().all(|p| p.x > 1.0 && p.x < 11.0 && p.y > 1.0 && p.y < 7.0)
            })
            .expect("interior face exists");
        road.faces.remove(interior);
        road.compact();
        let report = validate_scene(&assets);
        assert!(!report.passes());
        assert!(report
            .failures()
            .any(|c| c.check == "boundary_loop_count" || c.check == "mesh_valid"));
    }

    #[test]
    fn shifted_defect_fails_coincidence() {
        let mut assets = scene();
        let (_, mesh) = &mut assets.defects[0];
        for v in mesh.vertices.iter_mut() {
            v.x += 0.001;
        }
        let report = validate_scene(&assets);
        assert!(!report.passes());
        assert!(report
            .failures()
            .any(|c| c.check == "boundary_coincides_with_host"));
    }
}
