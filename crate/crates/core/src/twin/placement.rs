//! Randomized defect placement with rejection sampling.
//!
//! Each placement draws from its own RNG stream derived from
//! `(master_seed, placement index)`, so manifests are identical across
//! re-runs regardless of scheduling. Acceptance is sequential by index:
//! a candidate is rejected when its transformed boundary leaves the segment
//! polygon or touches a previously accepted placement.

use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use super::segment::bbox;
use super::{Result, RoadSegment, TwinError};
use crate::math::{p2, p3, Point2, Point3};
use crate::model::ModelLibrary;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlacementConfig {
    pub scale_range: (f64, f64),
    /// Yaw range in radians, sampled uniformly.
    pub yaw_range: (f64, f64),
    pub max_attempts: u32,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        PlacementConfig {
            scale_range: (0.5, 1.5),
            yaw_range: (0.0, 2.0 * core::f64::consts::PI),
            max_attempts: 200,
        }
    }
}

impl PlacementConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale_range.0 > 0.0 && self.scale_range.1 >= self.scale_range.0) {
            return Err(TwinError::InvalidConfig(String::from(
                "scale range must be positive and ordered",
            )));
        }
        if self.yaw_range.1 < self.yaw_range.0 || self.max_attempts == 0 {
            return Err(TwinError::InvalidConfig(String::from(
                "yaw range must be ordered and max_attempts positive",
            )));
        }
        Ok(())
    }
}

/// One accepted defect placement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Placement {
    pub index: u32,
    pub defect: String,
    pub segment: String,
    pub position: Point2,
    pub yaw: f64,
    pub scale: f64,
    /// Derived RNG stream seed (lineage: master seed + index).
    pub seed: u64,
    pub attempts: u32,
    /// Transformed defect boundary polygon, z = 0 frame.
    pub boundary: Vec<Point2>,
}

impl Placement {
    /// Applies scale, yaw and translation to a canonical-frame 2D point.
    pub fn apply_2d(&self, p: Point2) -> Point2 {
        let (s, c) = self.yaw.sin_cos();
        let x = p.x * self.scale;
        let y = p.y * self.scale;
        p2(c * x - s * y + self.position.x, s * x + c * y + self.position.y)
    }

    /// Applies the placement to a canonical-frame 3D point (z scales).
    pub fn apply_3d(&self, p: Point3) -> Point3 {
        let xy = self.apply_2d(p.xy());
        p3(xy.x, xy.y, p.z * self.scale)
    }

    pub fn boundary_centroid(&self) -> Point2 {
        let inv = 1.0 / self.boundary.len() as f64;
        self.boundary
            .iter()
            .fold(Point2::ZERO, |acc, p| acc.add(*p))
            .scale(inv)
    }
}

/// True if `poly` lies strictly inside `outer` (no touching).
fn strictly_inside(poly: &[Point2], outer: &[Point2]) -> bool {
    for &p in poly {
        if !crate::geometry::point_strictly_in_polygon(p, outer, 1e-9) {
            return false;
        }
    }
    let (n, m) = (poly.len(), outer.len());
    for i in 0..n {
        for j in 0..m {
            if crate::geometry::segments_intersect(
                poly[i],
                poly[(i + 1) % n],
                outer[j],
                outer[(j + 1) % m],
            ) {
                return false;
            }
        }
    }
    true
}

/// Samples `count` placements over the segments. Deterministic for a given
/// `master_seed`; fails once a placement exhausts its attempt budget.
pub fn sample_placements(
    segments: &[RoadSegment],
    library: &ModelLibrary,
    count: u32,
    master_seed: u64,
    config: &PlacementConfig,
) -> Result<Vec<Placement>> {
    config.validate()?;
    let defect_names = library.defect_names();
    if defect_names.is_empty() {
        return Err(TwinError::EmptyLibrary);
    }
    if segments.is_empty() && count > 0 {
        return Err(TwinError::InvalidConfig(String::from("no segments")));
    }
    let mut accepted: Vec<Placement> = Vec::with_capacity(count as usize);
    for index in 0..count {
        let seed = crate::rng::derive_seed(master_seed, index as u64);
        let mut rng = crate::rng::seeded_rng(seed);
        let mut placed = None;
        let mut attempts = 0;
        while attempts < config.max_attempts {
            attempts += 1;
            let segment = &segments[rng.random_range(0..segments.len())];
            let defect_name = defect_names[rng.random_range(0..defect_names.len())];
            let defect = library.get_defect(defect_name)?;
            let yaw = sample_range(&mut rng, config.yaw_range);
            let scale = sample_range(&mut rng, config.scale_range);
            // Position range that keeps the transformed boundary bbox inside
            // the segment bbox; degenerate range means this candidate cannot
            // fit at all.
            let base: Vec<Point2> = defect
                .boundary_polygon_2d()
                .iter()
                .map(|&p| {
                    let (s, c) = yaw.sin_cos();
                    let (x, y) = (p.x * scale, p.y * scale);
                    p2(c * x - s * y, s * x + c * y)
                })
                .collect();
            let (bmin, bmax) = bbox(&base);
            let (smin, smax) = bbox(&segment.outer);
            let lo = p2(smin.x - bmin.x, smin.y - bmin.y);
            let hi = p2(smax.x - bmax.x, smax.y - bmax.y);
            if lo.x >= hi.x || lo.y >= hi.y {
                continue;
            }
            let position = p2(
                sample_range(&mut rng, (lo.x, hi.x)),
                sample_range(&mut rng, (lo.y, hi.y)),
            );
            let candidate = Placement {
                index,
                defect: String::from(defect_name),
                segment: segment.id.clone(),
                position,
                yaw,
                scale,
                seed,
                attempts,
                boundary: Vec::new(),
            };
            let boundary: Vec<Point2> = defect
                .boundary_polygon_2d()
                .iter()
                .map(|&p| candidate.apply_2d(p))
                .collect();
            if !strictly_inside(&boundary, &segment.outer) {
                continue;
            }
            let clash = accepted
                .iter()
                .filter(|p| p.segment == segment.id)
                .any(|p| !crate::geometry::polygons_disjoint(&boundary, &p.boundary));
            if clash {
                continue;
            }
            placed = Some(Placement {
                boundary,
                ..candidate
            });
            break;
        }
        match placed {
            Some(p) => accepted.push(p),
            None => {
                return Err(TwinError::PlacementFailed {
                    index,
                    attempts,
                    achieved: accepted.len() as u32,
                })
            }
        }
    }
    Ok(accepted)
}

fn sample_range<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.random_range(range.0..range.1)
    } else {
        range.0
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{
        build_defect_model, extract_defect_instances, sample_defect_points, ElevationMap,
        LibraryEntry, ModelLibrary,
    };

    pub(crate) fn test_library() -> ModelLibrary {
        let mut emap =
            ElevationMap::from_heights(60, 60, 0.01, p2(-0.3, -0.3), alloc::vec![0.0; 3600])
                .unwrap();
        for r in 10..50u32 {
            for c in 10..50u32 {
                emap.set(c, r, -0.05);
            }
        }
        let inst = &extract_defect_instances(&emap, -0.015, 0.0)[0];
        let model = build_defect_model(&sample_defect_points(&emap, inst, 3).unwrap()).unwrap();
        let mut lib = ModelLibrary::new();
        lib.add("pit", LibraryEntry::Defect(model)).unwrap();
        lib
    }

    fn test_segment() -> RoadSegment {
        RoadSegment::planar(
            "s0",
            &[p2(0.0, 0.0), p2(12.0, 0.0), p2(12.0, 8.0), p2(0.0, 8.0)],
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn count_zero_is_empty() {
        let lib = test_library();
        let segs = alloc::vec![test_segment()];
        let out = sample_placements(&segs, &lib, 0, 42, &PlacementConfig::default()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn placements_stay_inside_and_disjoint() {
        let lib = test_library();
        let segs = alloc::vec![test_segment()];
        let out = sample_placements(&segs, &lib, 8, 42, &PlacementConfig::default()).unwrap();
        assert_eq!(out.len(), 8);
        for p in &out {
            assert!(strictly_inside(&p.boundary, &segs[0].outer));
        }
        for i in 0..out.len() {
            for j in (i + 1)..out.len() {
                assert!(crate::geometry::polygons_disjoint(
                    &out[i].boundary,
                    &out[j].boundary
                ));
            }
        }
    }

    #[test]
    fn same_seed_same_manifest() {
        let lib = test_library();
        let segs = alloc::vec![test_segment()];
        let a = sample_placements(&segs, &lib, 6, 7, &PlacementConfig::default()).unwrap();
        let b = sample_placements(&segs, &lib, 6, 7, &PlacementConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = sample_placements(&segs, &lib, 6, 8, &PlacementConfig::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tight_segment_with_margin_fits() {
        // Segment barely larger than the defect bounding box (1 cm margin),
        // pinned yaw and scale: the only feasible position class must land.
        let lib = test_library();
        let defect = lib.get_defect("pit").unwrap();
        let (bmin, bmax) = bbox(&defect.boundary_polygon_2d());
        let m = 0.01;
        let poly = alloc::vec![
            p2(bmin.x - m, bmin.y - m),
            p2(bmax.x + m, bmin.y - m),
            p2(bmax.x + m, bmax.y + m),
            p2(bmin.x - m, bmax.y + m),
        ];
        let seg = RoadSegment::planar("tight", &poly, 0.0).unwrap();
        let config = PlacementConfig {
            scale_range: (1.0, 1.0),
            yaw_range: (0.0, 0.0),
            max_attempts: 200,
        };
        let out = sample_placements(&[seg.clone()], &lib, 1, 5, &config).unwrap();
        assert_eq!(out.len(), 1);
        assert!(strictly_inside(&out[0].boundary, &seg.outer));
        assert!(out[0].position.norm() < 0.02, "{:?}", out[0].position);
    }

    #[test]
    fn impossible_placement_reports_achieved() {
        let lib = test_library();
        // Segment smaller than the defect: nothing can fit.
        let seg = RoadSegment::planar(
            "tiny",
            &[p2(0.0, 0.0), p2(0.2, 0.0), p2(0.2, 0.2), p2(0.0, 0.2)],
            0.0,
        )
        .unwrap();
        let err = sample_placements(&[seg], &lib, 1, 3, &PlacementConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            TwinError::PlacementFailed { achieved: 0, .. }
        ));
    }
}
