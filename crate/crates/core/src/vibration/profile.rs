//! Wheel-track ground profiles from scene meshes.

use alloc::vec::Vec;

use super::{Result, VibrationError};
use crate::geometry::ray_triangle_intersect;
use crate::math::{p2, p3, Point2};
use crate::planning::VehicleModel;
use crate::twin::SceneAssets;

#[allow(unused_imports)]
use num_traits::Float;

/// Ground heights along the four wheel tracks at uniform arc length.
/// Index order matches the wheel layout: [rear-left, rear-right,
/// front-left, front-right]; sample `i` is body station `i * ds`, with the
/// front tracks sampled `wheelbase` ahead on the same lines.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackProfile {
    pub ds: f64,
    pub tracks: [Vec<f64>; 4],
    /// Ray casts that missed and were filled from the nearest valid sample.
    pub missing_filled: usize,
}

impl TrackProfile {
    pub fn len(&self) -> usize {
        self.tracks[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks[0].is_empty()
    }

    /// Uniform-height profile (no defects), mostly for tests and baselines.
    pub fn flat(length: f64, ds: f64, height: f64) -> Result<Self> {
        if ds <= 0.0 {
            return Err(VibrationError::InvalidStep(ds));
        }
        let n = (length / ds).floor() as usize + 1;
        if n < 2 {
            return Err(VibrationError::ProfileTooShort(n));
        }
        let line = alloc::vec![height; n];
        Ok(TrackProfile {
            ds,
            tracks: [line.clone(), line.clone(), line.clone(), line],
            missing_filled: 0,
        })
    }

    /// Flat profile with a rectangular pit of `depth` under the given
    /// tracks, spanning stations [pit_start, pit_start + pit_len).
    pub fn with_pit(
        length: f64,
        ds: f64,
        pit_start: f64,
        pit_len: f64,
        depth: f64,
        tracks: [bool; 4],
    ) -> Result<Self> {
        let mut profile = Self::flat(length, ds, 0.0)?;
        let n = profile.len();
        for (t, &affected) in tracks.iter().enumerate() {
            if !affected {
                continue;
            }
            // Front tracks see the pit earlier in body-station coordinates;
            // here the pit is expressed per track line, so the same indices
            // apply (callers shift for the wheelbase when building scenes).
            for i in 0..n {
                let s = i as f64 * ds;
                if s >= pit_start && s < pit_start + pit_len {
                    profile.tracks[t][i] = -depth;
                }
            }
        }
        Ok(profile)
    }
}

/// Extracts the four wheel-track profiles along a straight trajectory by
/// casting downward rays against all scene meshes every `ds` meters.
/// Missing hits are filled from the nearest valid sample; more than 10%
/// missing is an error.
pub fn extract_track_profiles(
    assets: &SceneAssets,
    start: Point2,
    end: Point2,
    vehicle: &VehicleModel,
    ds: f64,
) -> Result<TrackProfile> {
    if ds <= 0.0 {
        return Err(VibrationError::InvalidStep(ds));
    }
    let dir = end.sub(start);
    let length = dir.norm();
    let n = (length / ds).floor() as usize + 1;
    if n < 2 {
        return Err(VibrationError::ProfileTooShort(n));
    }
    let unit = dir.scale(1.0 / length);
    let normal = p2(-unit.y, unit.x);
    let half = vehicle.width / 2.0;
    // Prefilter faces by 2D bounding box.
    struct Face {
        tri: [crate::math::Point3; 3],
        min: Point2,
        max: Point2,
    }
    let mut faces = Vec::new();
    let mut z_top = f64::NEG_INFINITY;
    for (_, mesh) in assets.roads.iter().chain(assets.defects.iter()) {
        for f in 0..mesh.faces.len() {
            let tri = mesh.face_points(f);
            let min = p2(
                tri[0].x.min(tri[1].x).min(tri[2].x),
                tri[0].y.min(tri[1].y).min(tri[2].y),
            );
            let max = p2(
                tri[0].x.max(tri[1].x).max(tri[2].x),
                tri[0].y.max(tri[1].y).max(tri[2].y),
            );
            for v in &tri {
                z_top = z_top.max(v.z);
            }
            faces.push(Face { tri, min, max });
        }
    }
    let origin_z = z_top + 1.0;
    let cast = |p: Point2| -> Option<f64> {
        let mut best: Option<f64> = None;
        for face in &faces {
            if p.x < face.min.x || p.x > face.max.x || p.y < face.min.y || p.y > face.max.y {
                continue;
            }
            if let Some(hit) =
                ray_triangle_intersect(p3(p.x, p.y, origin_z), p3(0.0, 0.0, -1.0), face.tri).hit()
            {
                let z = origin_z - hit.t;
                best = Some(best.map_or(z, |b: f64| b.max(z)));
            }
        }
        best
    };
    // Track lines: left/right offsets; front wheels run `wheelbase` ahead
    // on the same lines.
    let mut tracks: [Vec<Option<f64>>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    let mut missing = 0usize;
    for i in 0..n {
        let s = i as f64 * ds;
        let offsets = [
            (s, half),
            (s, -half),
            (s + vehicle.wheelbase, half),
            (s + vehicle.wheelbase, -half),
        ];
        for (t, &(station, lat)) in offsets.iter().enumerate() {
            let p = start.add(unit.scale(station)).add(normal.scale(lat));
            let z = cast(p);
            if z.is_none() {
                missing += 1;
            }
            tracks[t].push(z);
        }
    }
    let total = 4 * n;
    if missing * 10 > total {
        return Err(VibrationError::TrajectoryOffMesh { missing, total });
    }
    let filled = tracks.map(|line| fill_nearest(&line));
    Ok(TrackProfile {
        ds,
        tracks: filled,
        missing_filled: missing,
    })
}

/// Replaces `None` samples with the nearest valid value (ties go left).
fn fill_nearest(line: &[Option<f64>]) -> Vec<f64> {
    let n = line.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if let Some(z) = line[i] {
            out.push(z);
            continue;
        }
        let mut filled = 0.0;
        let mut found = false;
        for d in 1..n {
            if i >= d {
                if let Some(z) = line[i - d] {
                    filled = z;
                    found = true;
                    break;
                }
            }
            if i + d < n {
                if let Some(z) = line[i + d] {
                    filled = z;
                    found = true;
                    break;
                }
            }
        }
        out.push(if found { filled } else { 0.0 });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriMesh;
    use crate::twin::{SceneAssets, SceneManifest};

    fn slab(x0: f64, x1: f64, y0: f64, y1: f64, z: f64) -> TriMesh {
        TriMesh::new(
            alloc::vec![p3(x0, y0, z), p3(x1, y0, z), p3(x1, y1, z), p3(x0, y1, z)],
            alloc::vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    fn scene(meshes: Vec<(&str, TriMesh)>) -> SceneAssets {
        SceneAssets {
            roads: meshes
                .into_iter()
                .map(|(id, m)| (alloc::string::String::from(id), m))
                .collect(),
            defects: Vec::new(),
            manifest: SceneManifest {
                master_seed: 0,
                count: 0,
                placements: Vec::new(),
                segments: Vec::new(),
                validation: None,
            },
        }
    }

    #[test]
    fn flat_scene_constant_heights() {
        let assets = scene(alloc::vec![("r", slab(-5.0, 60.0, -5.0, 5.0, 0.2))]);
        let profile = extract_track_profiles(
            &assets,
            p2(0.0, 0.0),
            p2(40.0, 0.0),
            &VehicleModel::default(),
            0.1,
        )
        .unwrap();
        for track in &profile.tracks {
            assert!(track.iter().all(|&z| (z - 0.2).abs() < 1e-12));
        }
        assert_eq!(profile.missing_filled, 0);
    }

    #[test]
    fn defect_under_left_front_track_only() {
        // Base road at z = 0 plus a recessed slab replacing a patch of the
        // LEFT track line (y = +1) shifted for the front wheel.
        let mut meshes = alloc::vec![("road", slab(-5.0, 60.0, -5.0, 5.0, 0.0))];
        // Pit floor at z = -0.05 spanning x in [20, 21], y in [0.7, 1.3].
        // The road slab still covers it from above, so cast takes the max;
        // instead cut the scene: left strip split around the pit.
        meshes.clear();
        meshes.push(("road_a", slab(-5.0, 20.0, -5.0, 5.0, 0.0)));
        meshes.push(("road_b", slab(21.0, 60.0, -5.0, 5.0, 0.0)));
        meshes.push(("road_mid_lo", slab(20.0, 21.0, -5.0, 0.7, 0.0)));
        meshes.push(("road_mid_hi", slab(20.0, 21.0, 1.3, 5.0, 0.0)));
        meshes.push(("pit", slab(20.0, 21.0, 0.7, 1.3, -0.05)));
        let assets = scene(meshes);
        let vehicle = VehicleModel::default();
        let profile = extract_track_profiles(
            &assets,
            p2(0.0, 0.0),
            p2(40.0, 0.0),
            &vehicle,
            0.1,
        )
        .unwrap();
        // Front-left dips at body stations s where s + wheelbase is in the
        // pit; rear-left at s in the pit; right tracks stay flat.
        let fl_min = profile.tracks[2].iter().cloned().fold(f64::INFINITY, f64::min);
        let rl_min = profile.tracks[0].iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((fl_min + 0.05).abs() < 1e-12);
        assert!((rl_min + 0.05).abs() < 1e-12);
        for t in [1usize, 3] {
            assert!(profile.tracks[t].iter().all(|&z| z.abs() < 1e-12));
        }
        // The front track's dip leads the rear's by the wheelbase.
        let first_dip = |track: &Vec<f64>| track.iter().position(|&z| z < -0.01).unwrap();
        let lead = first_dip(&profile.tracks[0]) as f64 - first_dip(&profile.tracks[2]) as f64;
        assert!((lead * 0.1 - vehicle.wheelbase).abs() < 0.11, "lead {lead}");
    }

    #[test]
    fn zero_step_rejected() {
        let assets = scene(alloc::vec![("r", slab(-5.0, 60.0, -5.0, 5.0, 0.0))]);
        assert!(matches!(
            extract_track_profiles(
                &assets,
                p2(0.0, 0.0),
                p2(40.0, 0.0),
                &VehicleModel::default(),
                0.0
            ),
            Err(VibrationError::InvalidStep(_))
        ));
    }

    #[test]
    fn off_mesh_trajectory_rejected() {
        let assets = scene(alloc::vec![("r", slab(-5.0, 10.0, -5.0, 5.0, 0.0))]);
        let err = extract_track_profiles(
            &assets,
            p2(0.0, 0.0),
            p2(40.0, 0.0),
            &VehicleModel::default(),
            0.1,
        )
        .unwrap_err();
        assert!(matches!(err, VibrationError::TrajectoryOffMesh { .. }));
    }
}
