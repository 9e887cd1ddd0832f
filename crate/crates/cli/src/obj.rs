//! OBJ writer/reader for scene assets.
//!
//! One `o` record per asset, named `road/<id>` or `defect/<id>`, roads
//! first, each group sorted by id. Vertex indices are global and 1-based
//! per the OBJ convention. The writer is deterministic: re-exporting the
//! same assets yields byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use roadtwin_core::geometry::TriMesh;
use roadtwin_core::math::p3;

use crate::{io_err, CliError, Result};

/// Serializes named asset meshes to a single OBJ string.
pub fn obj_string(roads: &[(String, TriMesh)], defects: &[(String, TriMesh)]) -> String {
    let mut roads: Vec<&(String, TriMesh)> = roads.iter().collect();
    let mut defects: Vec<&(String, TriMesh)> = defects.iter().collect();
    roads.sort_by(|a, b| a.0.cmp(&b.0));
    defects.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    let mut offset = 1usize;
    for (group, assets) in [("road", roads), ("defect", defects)] {
        for (id, mesh) in assets {
            writeln!(out, "o {group}/{id}").unwrap();
            for v in &mesh.vertices {
                writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap();
            }
            for f in &mesh.faces {
                writeln!(
                    out,
                    "f {} {} {}",
                    offset + f[0] as usize,
                    offset + f[1] as usize,
                    offset + f[2] as usize
                )
                .unwrap();
            }
            offset += mesh.vertices.len();
        }
    }
    out
}

pub fn write_obj(path: &Path, roads: &[(String, TriMesh)], defects: &[(String, TriMesh)]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
    }
    fs::write(path, obj_string(roads, defects)).map_err(|e| io_err(path, e))
}

/// Parsed OBJ assets, split back into the road and defect groups.
pub struct ObjScene {
    pub roads: Vec<(String, TriMesh)>,
    pub defects: Vec<(String, TriMesh)>,
}

/// Reads an OBJ written by [`write_obj`] (o/v/f subset, global indices).
pub fn read_obj(path: &Path) -> Result<ObjScene> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |detail: String| CliError::Obj {
        path: path.to_path_buf(),
        detail,
    };
    let mut vertices = Vec::new();
    let mut objects: Vec<(String, Vec<[u32; 3]>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("o") => {
                let name = tokens
                    .next()
                    .ok_or_else(|| bad(format!("line {}: object without name", lineno + 1)))?;
                objects.push((name.to_string(), Vec::new()));
            }
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in coord.iter_mut() {
                    *c = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad(format!("line {}: bad vertex", lineno + 1)))?;
                }
                vertices.push(p3(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let target = objects
                    .last_mut()
                    .ok_or_else(|| bad(format!("line {}: face before object", lineno + 1)))?;
                let mut idx = [0u32; 3];
                for i in idx.iter_mut() {
                    let token = tokens
                        .next()
                        .ok_or_else(|| bad(format!("line {}: short face", lineno + 1)))?;
                    let first = token.split('/').next().unwrap_or(token);
                    let one_based: usize = first
                        .parse()
                        .map_err(|_| bad(format!("line {}: bad face index", lineno + 1)))?;
                    if one_based == 0 || one_based > vertices.len() {
                        return Err(bad(format!("line {}: face index out of range", lineno + 1)));
                    }
                    *i = (one_based - 1) as u32;
                }
                if tokens.next().is_some() {
                    return Err(bad(format!("line {}: triangles only", lineno + 1)));
                }
                target.1.push(idx);
            }
            _ => {}
        }
    }
    let mut scene = ObjScene {
        roads: Vec::new(),
        defects: Vec::new(),
    };
    for (name, faces) in objects {
        let mut mesh = TriMesh::new(vertices.clone(), faces);
        mesh.compact();
        match name.split_once('/') {
            Some(("road", id)) => scene.roads.push((id.to_string(), mesh)),
            Some(("defect", id)) => scene.defects.push((id.to_string(), mesh)),
            _ => return Err(bad(format!("unrecognized object name {name:?}"))),
        }
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(z: f64) -> TriMesh {
        TriMesh::new(
            vec![p3(0.0, 0.0, z), p3(1.0, 0.0, z), p3(0.0, 1.0, z)],
            vec![[0, 1, 2]],
        )
    }

    #[test]
    fn two_assets_two_o_records_in_fixed_order() {
        let roads = vec![("seg1".to_string(), tri(0.0))];
        let defects = vec![("d0000".to_string(), tri(-0.1))];
        let text = obj_string(&roads, &defects);
        let o_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("o ")).collect();
        assert_eq!(o_lines, vec!["o road/seg1", "o defect/d0000"]);
    }

    #[test]
    fn empty_defect_group_roads_only() {
        let roads = vec![("a".to_string(), tri(0.0)), ("b".to_string(), tri(0.0))];
        let text = obj_string(&roads, &[]);
        assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), 2);
        assert!(!text.contains("defect/"));
    }

    #[test]
    fn reexport_is_byte_identical() {
        let roads = vec![("a".to_string(), tri(0.25))];
        let defects = vec![("d0001".to_string(), tri(-0.125))];
        assert_eq!(obj_string(&roads, &defects), obj_string(&roads, &defects));
    }

    #[test]
    fn obj_roundtrip() {
        let roads = vec![("seg".to_string(), tri(0.5))];
        let defects = vec![("d0000".to_string(), tri(-0.5))];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.obj");
        write_obj(&path, &roads, &defects).unwrap();
        let scene = read_obj(&path).unwrap();
        assert_eq!(scene.roads.len(), 1);
        assert_eq!(scene.defects.len(), 1);
        assert_eq!(scene.roads[0].1, tri(0.5));
        assert_eq!(scene.defects[0].1, tri(-0.5));
    }
}
