//! Scene assembly: orchestration, manifest and asset disassembly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::integrate::{FaceTag, IntegratedSegment, SegmentIntegrator};
use super::validate::{validate_scene, ValidationReport};
use super::{sample_placements, Placement, PlacementConfig, Result, RoadSegment, TwinError};
use crate::geometry::TriMesh;
use crate::math::Point2;
use crate::model::{ModelLibrary, SurfaceModel};

/// Per-segment record kept in the scene manifest.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentRecord {
    pub id: String,
    pub outer: Vec<Point2>,
    /// Placement indices hosted by this segment, in integration order.
    pub hosted: Vec<u32>,
}

/// Everything needed to reproduce and audit a generated scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneManifest {
    pub master_seed: u64,
    pub count: u32,
    pub placements: Vec<Placement>,
    pub segments: Vec<SegmentRecord>,
    pub validation: Option<ValidationReport>,
}

/// Disassembled simulation assets: one mesh per road segment and per defect.
#[derive(Debug, Clone)]
pub struct SceneAssets {
    pub roads: Vec<(String, TriMesh)>,
    pub defects: Vec<(String, TriMesh)>,
    pub manifest: SceneManifest,
}

impl SceneAssets {
    /// Road outline polygons, for rasterization.
    pub fn road_polygons(&self) -> Vec<Vec<Point2>> {
        self.manifest
            .segments
            .iter()
            .map(|s| s.outer.clone())
            .collect()
    }

    /// Transformed defect boundary polygons, for rasterization.
    pub fn defect_polygons(&self) -> Vec<Vec<Point2>> {
        self.manifest
            .placements
            .iter()
            .map(|p| p.boundary.clone())
            .collect()
    }
}

/// Canonical id of the defect asset for placement `index`.
pub fn defect_asset_id(index: u32) -> String {
    format!("d{index:04}")
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneConfig {
    pub count: u32,
    pub master_seed: u64,
    pub placement: PlacementConfig,
    pub validate: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            count: 0,
            master_seed: 0,
            placement: PlacementConfig::default(),
            validate: true,
        }
    }
}

/// Integrates all placements hosted by one segment (the parallel work unit:
/// segments are independent and may run on any schedule).
pub fn integrate_segment(
    segment: &RoadSegment,
    placements: &[Placement],
    library: &ModelLibrary,
    surface: Option<&SurfaceModel>,
) -> Result<IntegratedSegment> {
    let mut integrator = SegmentIntegrator::new(segment)?;
    for p in placements {
        debug_assert_eq!(p.segment, segment.id);
        let defect = library.get_defect(&p.defect)?;
        integrator.integrate(defect, p)?;
    }
    if let Some(surface) = surface {
        integrator.restore_elevation(surface);
    }
    integrator.finish()
}

/// Splits integrated segments into road and defect asset groups by face
/// provenance. Shared boundary vertices are duplicated into both assets
/// with identical coordinates.
pub fn disassemble_assets(
    integrated: &[IntegratedSegment],
    placements: &[Placement],
    master_seed: u64,
) -> Result<SceneAssets> {
    let mut roads = Vec::new();
    let mut defects: BTreeMap<u32, (String, TriMesh)> = BTreeMap::new();
    let mut segments = Vec::new();
    for seg in integrated {
        if seg.tags.len() != seg.mesh.faces.len() {
            return Err(TwinError::UntaggedFaces {
                segment: seg.id.clone(),
            });
        }
        let road_faces: Vec<[u32; 3]> = seg
            .mesh
            .faces
            .iter()
            .zip(seg.tags.iter())
            .filter(|(_, t)| **t == FaceTag::Road)
            .map(|(f, _)| *f)
            .collect();
        let mut road = TriMesh::new(seg.mesh.vertices.clone(), road_faces);
        road.compact();
        roads.push((seg.id.clone(), road));
        for &placement in &seg.hosted {
            let faces: Vec<[u32; 3]> = seg
                .mesh
                .faces
                .iter()
                .zip(seg.tags.iter())
                .filter(|(_, t)| **t == FaceTag::Defect(placement))
                .map(|(f, _)| *f)
                .collect();
            let mut mesh = TriMesh::new(seg.mesh.vertices.clone(), faces);
            mesh.compact();
            defects.insert(placement, (defect_asset_id(placement), mesh));
        }
        segments.push(SegmentRecord {
            id: seg.id.clone(),
            outer: seg.outer.clone(),
            hosted: seg.hosted.clone(),
        });
    }
    Ok(SceneAssets {
        roads,
        defects: defects.into_values().collect(),
        manifest: SceneManifest {
            master_seed,
            count: placements.len() as u32,
            placements: placements.to_vec(),
            segments,
            validation: None,
        },
    })
}

/// Full scene generation: placement sampling, per-segment integration,
/// elevation restoration, disassembly and (optionally) validation.
///
/// Pure function of its inputs; rerunning with the same seed reproduces
/// the assets bit for bit.
pub fn generate_scene(
    segments: &[RoadSegment],
    library: &ModelLibrary,
    surface: Option<&SurfaceModel>,
    config: &SceneConfig,
) -> Result<SceneAssets> {
    let placements = sample_placements(
        segments,
        library,
        config.count,
        config.master_seed,
        &config.placement,
    )?;
    let mut by_segment: BTreeMap<&str, Vec<Placement>> = BTreeMap::new();
    for p in &placements {
        by_segment.entry(p.segment.as_str()).or_default().push(p.clone());
    }
    let integrated: Vec<IntegratedSegment> = segments
        .iter()
        .map(|seg| {
            let hosted = by_segment.get(seg.id.as_str()).map(|v| v.as_slice()).unwrap_or(&[]);
            integrate_segment(seg, hosted, library, surface)
        })
        .collect::<Result<_>>()?;
    let mut assets = disassemble_assets(&integrated, &placements, config.master_seed)?;
    if config.validate {
        let report = validate_scene(&assets);
        assets.manifest.validation = Some(report);
    }
    Ok(assets)
}
