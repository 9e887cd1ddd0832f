//! In-memory road model library. Persistence (directory of mesh files plus
//! a manifest) lives in the IO crate; entries are re-validated on load.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{DefectModel, ModelError, Result, SurfaceModel};

#[derive(Debug, Clone)]
pub enum LibraryEntry {
    Defect(DefectModel),
    Surface(SurfaceModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EntryKind {
    Defect,
    Surface,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntrySummary {
    pub name: String,
    pub kind: EntryKind,
    pub vertices: usize,
    pub faces: usize,
    /// Defect depth in meters; zero for surfaces.
    pub max_depth: f64,
}

/// Named collection of defect and surface models.
#[derive(Debug, Clone, Default)]
pub struct ModelLibrary {
    entries: BTreeMap<String, LibraryEntry>,
}

impl ModelLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds an entry under a unique name; the entry is validated first.
    pub fn add(&mut self, name: &str, entry: LibraryEntry) -> Result<()> {
        if self.entries.contains_key(name) {
            return Err(ModelError::DuplicateEntry(String::from(name)));
        }
        if let LibraryEntry::Defect(d) = &entry {
            d.validate()?;
        }
        self.entries.insert(String::from(name), entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&LibraryEntry> {
        self.entries
            .get(name)
            .ok_or_else(|| ModelError::MissingEntry(String::from(name)))
    }

    pub fn get_defect(&self, name: &str) -> Result<&DefectModel> {
        match self.get(name)? {
            LibraryEntry::Defect(d) => Ok(d),
            LibraryEntry::Surface(_) => Err(ModelError::WrongKind(String::from(name), "defect")),
        }
    }

    pub fn get_surface(&self, name: &str) -> Result<&SurfaceModel> {
        match self.get(name)? {
            LibraryEntry::Surface(s) => Ok(s),
            LibraryEntry::Defect(_) => Err(ModelError::WrongKind(String::from(name), "surface")),
        }
    }

    /// Names of all defect entries, sorted.
    pub fn defect_names(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, e)| matches!(e, LibraryEntry::Defect(_)))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LibraryEntry)> {
        self.entries.iter().map(|(n, e)| (n.as_str(), e))
    }

    /// Sorted manifest of entry summaries.
    pub fn manifest(&self) -> Vec<EntrySummary> {
        self.entries
            .iter()
            .map(|(name, entry)| match entry {
                LibraryEntry::Defect(d) => EntrySummary {
                    name: name.clone(),
                    kind: EntryKind::Defect,
                    vertices: d.mesh.vertices.len(),
                    faces: d.mesh.faces.len(),
                    max_depth: d.metadata.max_depth,
                },
                LibraryEntry::Surface(s) => EntrySummary {
                    name: name.clone(),
                    kind: EntryKind::Surface,
                    vertices: s.mesh().vertices.len(),
                    faces: s.mesh().faces.len(),
                    max_depth: 0.0,
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::p2;
    use crate::model::{
        build_defect_model, extract_defect_instances, sample_defect_points, ElevationMap,
    };

    fn sample_defect() -> DefectModel {
        let mut emap =
            ElevationMap::from_heights(30, 30, 0.01, p2(0.0, 0.0), alloc::vec![0.0; 900])
                .unwrap();
        for r in 10..20u32 {
            for c in 10..20u32 {
                emap.set(c, r, -0.04);
            }
        }
        let inst = &extract_defect_instances(&emap, -0.015, 0.0)[0];
        build_defect_model(&sample_defect_points(&emap, inst, 3).unwrap()).unwrap()
    }

    #[test]
    fn add_then_get_roundtrips_in_memory() {
        let mut lib = ModelLibrary::new();
        let model = sample_defect();
        lib.add("pit", LibraryEntry::Defect(model.clone())).unwrap();
        let got = lib.get_defect("pit").unwrap();
        assert_eq!(got.mesh, model.mesh);
        assert_eq!(got.boundary, model.boundary);
    }

    #[test]
    fn duplicate_name_rejected() {
        let mut lib = ModelLibrary::new();
        let model = sample_defect();
        lib.add("pit", LibraryEntry::Defect(model.clone())).unwrap();
        assert!(matches!(
            lib.add("pit", LibraryEntry::Defect(model)),
            Err(ModelError::DuplicateEntry(_))
        ));
    }

    #[test]
    fn empty_manifest() {
        assert!(ModelLibrary::new().manifest().is_empty());
    }

    #[test]
    fn missing_entry_named() {
        let lib = ModelLibrary::new();
        match lib.get("nope") {
            Err(ModelError::MissingEntry(n)) => assert_eq!(n, "nope"),
            other => panic!("{other:?}"),
        }
    }
}
