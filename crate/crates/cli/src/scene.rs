//! Scene-generation orchestration: parallel per-segment integration with a
//! deterministic ordered reduce, plus asset/manifest writing and reloading.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use roadtwin_core::model::ModelLibrary;
use roadtwin_core::twin::{
    disassemble_assets, integrate_segment, sample_placements, validate_scene, Placement,
    RoadSegment, SceneAssets, SceneManifest, TwinError,
};

use crate::config::{SceneGenConfig, SegmentSpec};
use crate::manifest::RunManifest;
use crate::{config, obj, CliError, Result};

/// Builds planar segment meshes from their outline specs.
pub fn build_segments(specs: &[SegmentSpec], max_edge: f64) -> Result<Vec<RoadSegment>> {
    specs
        .iter()
        .map(|spec| {
            RoadSegment::planar(&spec.id, &config::polygon(&spec.polygon), max_edge)
                .map_err(CliError::Twin)
        })
        .collect()
}

/// Generates the scene with segment integrations running in parallel.
///
/// Placement sampling is sequential by contract (acceptance depends on
/// earlier placements); integration parallelizes over segments, and the
/// ordered collect keeps the reduce deterministic for any thread count.
pub fn generate(
    segments: &[RoadSegment],
    library: &ModelLibrary,
    surface: Option<&str>,
    cfg: &SceneGenConfig,
    seed: u64,
) -> Result<SceneAssets> {
    let surface_model = surface
        .map(|name| library.get_surface(name))
        .transpose()
        .map_err(TwinError::Model)?;
    let placements = sample_placements(segments, library, cfg.count, seed, &cfg.placement())?;
    let grouped: Vec<Vec<Placement>> = segments
        .iter()
        .map(|seg| {
            placements
                .iter()
                .filter(|p| p.segment == seg.id)
                .cloned()
                .collect()
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(crate::thread_cap().unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let integrated = pool.install(|| {
        segments
            .par_iter()
            .zip(grouped.par_iter())
            .map(|(seg, hosted)| integrate_segment(seg, hosted, library, surface_model))
            .collect::<std::result::Result<Vec<_>, TwinError>>()
    })?;
    let mut assets = disassemble_assets(&integrated, &placements, seed)?;
    if cfg.validate {
        let report = validate_scene(&assets);
        assets.manifest.validation = Some(report);
    }
    Ok(assets)
}

pub const SCENE_OBJ: &str = "scene.obj";
pub const SCENE_MANIFEST: &str = "manifest.json";

/// Writes scene.obj and manifest.json into the output directory.
pub fn write_scene(out_dir: &Path, assets: &SceneAssets, run: &mut RunManifest) -> Result<PathBuf> {
    let obj_path = out_dir.join(SCENE_OBJ);
    obj::write_obj(&obj_path, &assets.roads, &assets.defects)?;
    run.record_output(&obj_path);
    run.scene = Some(assets.manifest.clone());
    let manifest_path = out_dir.join(SCENE_MANIFEST);
    run.record_output(&manifest_path);
    run.write(&manifest_path)?;
    Ok(obj_path)
}

/// Reloads scene assets written by [`write_scene`].
pub fn read_scene(dir: &Path) -> Result<SceneAssets> {
    let obj_path = if dir.extension().is_some() {
        dir.to_path_buf()
    } else {
        dir.join(SCENE_OBJ)
    };
    let scene_dir = obj_path.parent().unwrap_or(dir).to_path_buf();
    let parsed = obj::read_obj(&obj_path)?;
    let manifest_path = scene_dir.join(SCENE_MANIFEST);
    let manifest: SceneManifest = if manifest_path.exists() {
        RunManifest::read(&manifest_path)?
            .scene
            .ok_or_else(|| CliError::Json {
                path: manifest_path.clone(),
                detail: "manifest carries no scene record".to_string(),
            })?
    } else {
        SceneManifest {
            master_seed: 0,
            count: parsed.defects.len() as u32,
            placements: Vec::new(),
            segments: Vec::new(),
            validation: None,
        }
    };
    Ok(SceneAssets {
        roads: parsed.roads,
        defects: parsed.defects,
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use roadtwin_core::math::p2;
    use roadtwin_core::model::{
        build_defect_model, extract_defect_instances, sample_defect_points, ElevationMap,
        LibraryEntry,
    };

    pub(crate) fn test_library() -> ModelLibrary {
        let mut emap =
            ElevationMap::from_heights(60, 60, 0.01, p2(-0.3, -0.3), vec![0.0; 3600]).unwrap();
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

    fn scene_config(out: &Path) -> SceneGenConfig {
        SceneGenConfig {
            segments: out.join("segments.json"),
            library: out.join("lib"),
            surface: None,
            count: 5,
            seed: 11,
            scale_range: (0.5, 1.5),
            yaw_range: (0.0, 2.0 * std::f64::consts::PI),
            max_attempts: 200,
            mesh_max_edge: 2.0,
            validate: true,
            out: out.to_path_buf(),
        }
    }

    fn segments() -> Vec<RoadSegment> {
        vec![
            RoadSegment::planar(
                "a",
                &[p2(0.0, 0.0), p2(10.0, 0.0), p2(10.0, 7.0), p2(0.0, 7.0)],
                2.0,
            )
            .unwrap(),
            RoadSegment::planar(
                "b",
                &[p2(11.0, 0.0), p2(21.0, 0.0), p2(21.0, 7.0), p2(11.0, 7.0)],
                2.0,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn parallel_generation_matches_serial() {
        let lib = test_library();
        let segs = segments();
        let dir = tempfile::tempdir().unwrap();
        let cfg = scene_config(dir.path());
        // Run through the parallel path...
        let a = generate(&segs, &lib, None, &cfg, 11).unwrap();
        // ...and through the sequential core orchestrator.
        let core_cfg = roadtwin_core::twin::SceneConfig {
            count: cfg.count,
            master_seed: 11,
            placement: cfg.placement(),
            validate: true,
        };
        let b = roadtwin_core::twin::generate_scene(&segs, &lib, None, &core_cfg).unwrap();
        assert_eq!(a.manifest, b.manifest);
        assert_eq!(a.roads.len(), b.roads.len());
        for ((ia, ma), (ib, mb)) in a.roads.iter().zip(b.roads.iter()) {
            assert_eq!(ia, ib);
            assert_eq!(ma, mb);
        }
        for ((ia, ma), (ib, mb)) in a.defects.iter().zip(b.defects.iter()) {
            assert_eq!(ia, ib);
            assert_eq!(ma, mb);
        }
    }

    #[test]
    fn scene_writes_and_reloads() {
        let lib = test_library();
        let segs = segments();
        let dir = tempfile::tempdir().unwrap();
        let cfg = scene_config(dir.path());
        let assets = generate(&segs, &lib, None, &cfg, 11).unwrap();
        let mut run = RunManifest::new("generate-scene", serde_json::json!({}));
        write_scene(dir.path(), &assets, &mut run).unwrap();
        let back = read_scene(dir.path()).unwrap();
        assert_eq!(back.roads.len(), assets.roads.len());
        assert_eq!(back.defects.len(), assets.defects.len());
        assert_eq!(back.manifest.placements, assets.manifest.placements);
        // Meshes round-trip through OBJ text with shortest-float encoding.
        for ((_, ma), (_, mb)) in assets.roads.iter().zip(back.roads.iter()) {
            assert_eq!(ma.faces.len(), mb.faces.len());
            for (va, vb) in ma.vertices.iter().zip(mb.vertices.iter()) {
                assert_eq!(va.x.to_bits(), vb.x.to_bits());
                assert_eq!(va.y.to_bits(), vb.y.to_bits());
                assert_eq!(va.z.to_bits(), vb.z.to_bits());
            }
        }
    }
}
