//! Model library persistence: a directory with one PLY mesh per entry and
//! a JSON manifest carrying boundaries, transforms and metadata.
//!
//! Meshes are stored as binary f64 PLY and all scalars go through JSON's
//! shortest-roundtrip float encoding, so save/load reproduces every field
//! bit for bit. Entries are re-validated on load.

use std::fs;
use std::path::{Path, PathBuf};

use roadtwin_core::geometry::BoundaryLoop;
use roadtwin_core::math::RigidTransform;
use roadtwin_core::model::{
    DefectMetadata, DefectModel, LibraryEntry, ModelLibrary, SurfaceModel,
};
use serde::{Deserialize, Serialize};

use crate::{io_err, ply, CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRecord {
    pub boundary: Vec<u32>,
    pub alignment: RigidTransform,
    pub metadata: DefectMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceRecord {
    pub leveling: RigidTransform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub name: String,
    pub mesh: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<DefectRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceRecord>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryManifest {
    pub entries: Vec<EntryRecord>,
}

pub fn valid_entry_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

/// Saves the library into `dir` (created if needed).
pub fn save_library(dir: &Path, library: &ModelLibrary) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut manifest = LibraryManifest::default();
    for (name, entry) in library.iter() {
        if !valid_entry_name(name) {
            return Err(CliError::Config(format!(
                "library entry name {name:?} not filesystem-safe"
            )));
        }
        let mesh_file = format!("{name}.ply");
        let record = match entry {
            LibraryEntry::Defect(d) => {
                ply::write_mesh(&dir.join(&mesh_file), &d.mesh)?;
                EntryRecord {
                    name: name.to_string(),
                    mesh: mesh_file,
                    defect: Some(DefectRecord {
                        boundary: d.boundary.indices.clone(),
                        alignment: d.alignment,
                        metadata: d.metadata,
                    }),
                    surface: None,
                }
            }
            LibraryEntry::Surface(s) => {
                ply::write_mesh(&dir.join(&mesh_file), s.mesh())?;
                EntryRecord {
                    name: name.to_string(),
                    mesh: mesh_file,
                    defect: None,
                    surface: Some(SurfaceRecord {
                        leveling: *s.leveling(),
                    }),
                }
            }
        };
        manifest.entries.push(record);
    }
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json).map_err(|e| io_err(&path, e))
}

/// Loads a library directory, validating every entry.
pub fn load_library(dir: &Path) -> Result<ModelLibrary> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
    let manifest: LibraryManifest = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: manifest_path.clone(),
        detail: e.to_string(),
    })?;
    let mut library = ModelLibrary::new();
    for record in &manifest.entries {
        let mesh_path = dir.join(&record.mesh);
        if !mesh_path.exists() {
            return Err(CliError::LibraryMissingFile {
                path: dir.to_path_buf(),
                file: record.mesh.clone(),
            });
        }
        let mesh = ply::read_mesh(&mesh_path)?;
        let entry = match (&record.defect, &record.surface) {
            (Some(defect), None) => LibraryEntry::Defect(DefectModel {
                mesh,
                boundary: BoundaryLoop {
                    indices: defect.boundary.clone(),
                },
                alignment: defect.alignment,
                metadata: defect.metadata,
            }),
            (None, Some(surface)) => {
                LibraryEntry::Surface(SurfaceModel::from_mesh(mesh, surface.leveling)?)
            }
            _ => {
                return Err(CliError::Json {
                    path: manifest_path.clone(),
                    detail: format!(
                        "entry {:?} must carry exactly one of defect/surface",
                        record.name
                    ),
                })
            }
        };
        library.add(&record.name, entry)?;
    }
    Ok(library)
}

/// Copies one entry's files into a library directory and registers it.
pub fn import_entry(
    dir: &Path,
    name: &str,
    mesh_path: &Path,
    meta_path: &Path,
) -> Result<PathBuf> {
    if !valid_entry_name(name) {
        return Err(CliError::Config(format!(
            "entry name {name:?} not filesystem-safe"
        )));
    }
    let mut library = if dir.join(MANIFEST_FILE).exists() {
        load_library(dir)?
    } else {
        ModelLibrary::new()
    };
    let mesh = ply::read_mesh(mesh_path)?;
    let text = fs::read_to_string(meta_path).map_err(|e| io_err(meta_path, e))?;
    // Meta may describe a defect or a surface record.
    let entry = if let Ok(defect) = serde_json::from_str::<DefectRecord>(&text) {
        LibraryEntry::Defect(DefectModel {
            mesh,
            boundary: BoundaryLoop {
                indices: defect.boundary,
            },
            alignment: defect.alignment,
            metadata: defect.metadata,
        })
    } else {
        let surface: SurfaceRecord =
            serde_json::from_str(&text).map_err(|e| CliError::Json {
                path: meta_path.to_path_buf(),
                detail: format!("neither defect nor surface record: {e}"),
            })?;
        LibraryEntry::Surface(SurfaceModel::from_mesh(mesh, surface.leveling)?)
    };
    library.add(name, entry)?;
    save_library(dir, &library)?;
    Ok(dir.join(format!("{name}.ply")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use roadtwin_core::math::p2;
    use roadtwin_core::model::{
        build_defect_model, extract_defect_instances, reconstruct_surface, sample_defect_points,
        ElevationMap, RegisteredCloud,
    };

    fn sample_library() -> ModelLibrary {
        let mut emap =
            ElevationMap::from_heights(40, 40, 0.01, p2(-0.2, -0.2), vec![0.0; 1600]).unwrap();
        for r in 12..28u32 {
            for c in 12..28u32 {
                emap.set(c, r, -0.04 - 0.0001 * (c as f64));
            }
        }
        let inst = &extract_defect_instances(&emap, -0.015, 0.0)[0];
        let defect = build_defect_model(&sample_defect_points(&emap, inst, 3).unwrap()).unwrap();
        let cloud = RegisteredCloud::from_points(
            (0..200)
                .map(|k| {
                    roadtwin_core::math::p3(
                        (k % 20) as f64 * 0.6,
                        (k / 20) as f64 * 0.6,
                        0.01 * ((k % 20) as f64 * 0.6).sin(),
                    )
                })
                .collect(),
        );
        let surface = reconstruct_surface(&cloud, 0.5).unwrap();
        let mut lib = ModelLibrary::new();
        lib.add("pit-a", LibraryEntry::Defect(defect)).unwrap();
        lib.add("ground", LibraryEntry::Surface(surface)).unwrap();
        lib
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let lib = sample_library();
        let dir = tempfile::tempdir().unwrap();
        save_library(dir.path(), &lib).unwrap();
        let back = load_library(dir.path()).unwrap();
        let (a, b) = (
            lib.get_defect("pit-a").unwrap(),
            back.get_defect("pit-a").unwrap(),
        );
        assert_eq!(a.boundary, b.boundary);
        assert_eq!(a.metadata, b.metadata);
        assert_eq!(a.alignment, b.alignment);
        assert_eq!(a.mesh.faces, b.mesh.faces);
        for (va, vb) in a.mesh.vertices.iter().zip(b.mesh.vertices.iter()) {
            assert_eq!(va.x.to_bits(), vb.x.to_bits());
            assert_eq!(va.y.to_bits(), vb.y.to_bits());
            assert_eq!(va.z.to_bits(), vb.z.to_bits());
        }
        let (sa, sb) = (
            lib.get_surface("ground").unwrap(),
            back.get_surface("ground").unwrap(),
        );
        assert_eq!(sa.mesh(), sb.mesh());
        assert_eq!(sa.leveling(), sb.leveling());
        // Saving the loaded library reproduces identical bytes.
        let dir2 = tempfile::tempdir().unwrap();
        save_library(dir2.path(), &back).unwrap();
        for file in ["manifest.json", "pit-a.ply", "ground.ply"] {
            let x = fs::read(dir.path().join(file)).unwrap();
            let y = fs::read(dir2.path().join(file)).unwrap();
            assert_eq!(x, y, "{file} differs");
        }
    }

    #[test]
    fn missing_mesh_file_named() {
        let lib = sample_library();
        let dir = tempfile::tempdir().unwrap();
        save_library(dir.path(), &lib).unwrap();
        fs::remove_file(dir.path().join("pit-a.ply")).unwrap();
        match load_library(dir.path()) {
            Err(CliError::LibraryMissingFile { file, .. }) => assert_eq!(file, "pit-a.ply"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn corrupted_defect_rejected_on_load() {
        let lib = sample_library();
        let dir = tempfile::tempdir().unwrap();
        save_library(dir.path(), &lib).unwrap();
        // Raise an interior vertex above the boundary plane: the depression
        // invariant must fail on load.
        let mesh_path = dir.path().join("pit-a.ply");
        let mut mesh = ply::read_mesh(&mesh_path).unwrap();
        let lowest = (0..mesh.vertices.len())
            .min_by(|&a, &b| mesh.vertices[a].z.total_cmp(&mesh.vertices[b].z))
            .unwrap();
        mesh.vertices[lowest].z = 0.5;
        ply::write_mesh(&mesh_path, &mesh).unwrap();
        assert!(matches!(load_library(dir.path()), Err(CliError::Model(_))));
    }
}
