//! PGM (P5) rasters with JSON sidecars: occupancy grid maps, elevation
//! maps and binary road masks.

use std::fs;
use std::path::{Path, PathBuf};

use roadtwin_core::math::p2;
use roadtwin_core::model::ElevationMap;
use roadtwin_core::planning::{CellState, GridMap};
use serde::{Deserialize, Serialize};

use crate::{io_err, CliError, Result};

const GRID_FREE: u16 = 255;
const GRID_DEFECT: u16 = 128;
const GRID_OFFROAD: u16 = 0;

/// Raw P5 raster.
pub struct Pgm {
    pub width: u32,
    pub height: u32,
    pub maxval: u32,
    /// Row-major samples.
    pub data: Vec<u16>,
}

fn pgm_err(path: &Path, detail: impl Into<String>) -> CliError {
    CliError::Pgm {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

pub fn read_pgm(path: &Path) -> Result<Pgm> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    // Header: magic, width, height, maxval separated by whitespace
    // (comments allowed), then a single whitespace byte before the body.
    let mut cursor = 0usize;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while cursor < bytes.len() && bytes[cursor].is_ascii_whitespace() {
            cursor += 1;
        }
        if cursor < bytes.len() && bytes[cursor] == b'#' {
            while cursor < bytes.len() && bytes[cursor] != b'\n' {
                cursor += 1;
            }
            continue;
        }
        let start = cursor;
        while cursor < bytes.len() && !bytes[cursor].is_ascii_whitespace() {
            cursor += 1;
        }
        if start == cursor {
            return Err(pgm_err(path, "truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..cursor]).to_string());
    }
    cursor += 1; // single whitespace after maxval
    if fields[0] != "P5" {
        return Err(pgm_err(path, format!("expected P5, got {:?}", fields[0])));
    }
    let width: u32 = fields[1].parse().map_err(|_| pgm_err(path, "bad width"))?;
    let height: u32 = fields[2].parse().map_err(|_| pgm_err(path, "bad height"))?;
    let maxval: u32 = fields[3].parse().map_err(|_| pgm_err(path, "bad maxval"))?;
    let n = (width as usize) * (height as usize);
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    if bytes.len() < cursor + n * bytes_per {
        return Err(pgm_err(
            path,
            format!(
                "body too short: need {} bytes, have {}",
                n * bytes_per,
                bytes.len() - cursor
            ),
        ));
    }
    let mut data = Vec::with_capacity(n);
    for i in 0..n {
        let v = if bytes_per == 2 {
            u16::from_be_bytes([bytes[cursor + 2 * i], bytes[cursor + 2 * i + 1]])
        } else {
            bytes[cursor + i] as u16
        };
        data.push(v);
    }
    Ok(Pgm {
        width,
        height,
        maxval,
        data,
    })
}

pub fn write_pgm(path: &Path, pgm: &Pgm) -> Result<()> {
    let mut out = format!("P5\n{} {}\n{}\n", pgm.width, pgm.height, pgm.maxval).into_bytes();
    if pgm.maxval > 255 {
        for &v in &pgm.data {
            out.extend_from_slice(&v.to_be_bytes());
        }
    } else {
        out.extend(pgm.data.iter().map(|&v| v as u8));
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn sidecar_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("json")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSidecar {
    resolution: f64,
    origin: [f64; 2],
    width: u32,
    height: u32,
}

/// Writes a grid map as PGM (free=255, defect=128, off-road=0) plus a JSON
/// sidecar carrying the geometry. Lossless round trip.
pub fn write_gridmap(path: &Path, grid: &GridMap) -> Result<()> {
    let data = grid
        .cells()
        .iter()
        .map(|c| match c {
            CellState::Free => GRID_FREE,
            CellState::Defect => GRID_DEFECT,
            CellState::OffRoad => GRID_OFFROAD,
        })
        .collect();
    write_pgm(
        path,
        &Pgm {
            width: grid.width,
            height: grid.height,
            maxval: 255,
            data,
        },
    )?;
    let sidecar = GridSidecar {
        resolution: grid.resolution,
        origin: [grid.origin.x, grid.origin.y],
        width: grid.width,
        height: grid.height,
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(sidecar_path(path), json).map_err(|e| io_err(&sidecar_path(path), e))
}

pub fn read_gridmap(path: &Path) -> Result<GridMap> {
    let pgm = read_pgm(path)?;
    if pgm.maxval != 255 {
        return Err(CliError::PgmMaxval {
            path: path.to_path_buf(),
            maxval: pgm.maxval,
            expected: 255,
        });
    }
    let side_path = sidecar_path(path);
    let text = fs::read_to_string(&side_path).map_err(|e| io_err(&side_path, e))?;
    let sidecar: GridSidecar = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: side_path.clone(),
        detail: e.to_string(),
    })?;
    if sidecar.width != pgm.width || sidecar.height != pgm.height {
        return Err(CliError::SidecarMismatch {
            path: side_path,
            detail: format!(
                "sidecar {}x{} vs raster {}x{}",
                sidecar.width, sidecar.height, pgm.width, pgm.height
            ),
        });
    }
    if sidecar.resolution <= 0.0 {
        return Err(CliError::SidecarMismatch {
            path: side_path,
            detail: format!("resolution {} must be positive", sidecar.resolution),
        });
    }
    let mut cells = Vec::with_capacity(pgm.data.len());
    for (i, &v) in pgm.data.iter().enumerate() {
        cells.push(match v {
            GRID_FREE => CellState::Free,
            GRID_DEFECT => CellState::Defect,
            GRID_OFFROAD => CellState::OffRoad,
            other => {
                return Err(pgm_err(
                    path,
                    format!("unexpected cell value {other} at index {i}"),
                ))
            }
        });
    }
    GridMap::new(
        sidecar.resolution,
        p2(sidecar.origin[0], sidecar.origin[1]),
        pgm.width,
        pgm.height,
        cells,
    )
    .map_err(CliError::Plan)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElevationSidecar {
    cell_size: f64,
    origin: [f64; 2],
    /// height = offset + raw * scale for raw >= 1; raw 0 is missing.
    scale: f64,
    offset: f64,
}

/// Writes an elevation map as 16-bit PGM plus sidecar. Quantized to the
/// 16-bit range (an input format; not required to round-trip exactly).
pub fn write_elevation_map(path: &Path, emap: &ElevationMap) -> Result<()> {
    let finite: Vec<f64> = emap.raw_heights().iter().copied().filter(|h| h.is_finite()).collect();
    let (min, max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| {
            (lo.min(h), hi.max(h))
        });
    let (offset, scale) = if finite.is_empty() || max <= min {
        (if finite.is_empty() { 0.0 } else { min }, 1e-5)
    } else {
        (min, (max - min) / 65534.0)
    };
    let data = emap
        .raw_heights()
        .iter()
        .map(|&h| {
            if h.is_finite() {
                (((h - offset) / scale).round() as u32 + 1).min(65535) as u16
            } else {
                0
            }
        })
        .collect();
    write_pgm(
        path,
        &Pgm {
            width: emap.width,
            height: emap.height,
            maxval: 65535,
            data,
        },
    )?;
    let sidecar = ElevationSidecar {
        cell_size: emap.cell_size,
        origin: [emap.origin.x, emap.origin.y],
        scale,
        offset,
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(sidecar_path(path), json).map_err(|e| io_err(&sidecar_path(path), e))
}

pub fn read_elevation_map(path: &Path) -> Result<ElevationMap> {
    let pgm = read_pgm(path)?;
    if pgm.maxval != 65535 {
        return Err(CliError::PgmMaxval {
            path: path.to_path_buf(),
            maxval: pgm.maxval,
            expected: 65535,
        });
    }
    let side_path = sidecar_path(path);
    let text = fs::read_to_string(&side_path).map_err(|e| io_err(&side_path, e))?;
    let sidecar: ElevationSidecar = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: side_path.clone(),
        detail: e.to_string(),
    })?;
    if sidecar.cell_size <= 0.0 {
        return Err(CliError::SidecarMismatch {
            path: side_path,
            detail: format!("cell_size {} must be positive", sidecar.cell_size),
        });
    }
    let heights: Vec<f64> = pgm
        .data
        .iter()
        .map(|&raw| {
            if raw == 0 {
                f64::NAN
            } else {
                sidecar.offset + (raw - 1) as f64 * sidecar.scale
            }
        })
        .collect();
    ElevationMap::from_heights(
        pgm.width,
        pgm.height,
        sidecar.cell_size,
        p2(sidecar.origin[0], sidecar.origin[1]),
        heights,
    )
    .map_err(CliError::Model)
}

/// Reads a binary road mask: values above half of maxval are road.
pub fn read_mask(path: &Path) -> Result<(u32, u32, Vec<bool>)> {
    let pgm = read_pgm(path)?;
    let threshold = (pgm.maxval / 2) as u16;
    let data = pgm.data.iter().map(|&v| v > threshold).collect();
    Ok((pgm.width, pgm.height, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use roadtwin_core::planning::{rasterize, MapBounds};

    #[test]
    fn gridmap_roundtrip() {
        let mut rng = roadtwin_core::rng::seeded_rng(4);
        let road = vec![p2(0.0, 0.0), p2(10.0, 0.0), p2(10.0, 10.0), p2(0.0, 10.0)];
        let mut defects = Vec::new();
        for _ in 0..5 {
            let cx = rng.random::<f64>() * 8.0 + 1.0;
            let cy = rng.random::<f64>() * 8.0 + 1.0;
            defects.push(vec![
                p2(cx - 0.4, cy - 0.4),
                p2(cx + 0.4, cy - 0.4),
                p2(cx + 0.4, cy + 0.4),
                p2(cx - 0.4, cy + 0.4),
            ]);
        }
        let grid = rasterize(
            &[road],
            &defects,
            MapBounds::new(p2(0.0, 0.0), p2(10.0, 10.0)),
            0.2,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.pgm");
        write_gridmap(&path, &grid).unwrap();
        let back = read_gridmap(&path).unwrap();
        assert_eq!(back, grid);
    }

    #[test]
    fn bad_sidecar_resolution_rejected() {
        let road = vec![p2(0.0, 0.0), p2(2.0, 0.0), p2(2.0, 2.0), p2(0.0, 2.0)];
        let grid = rasterize(
            &[road],
            &[],
            MapBounds::new(p2(0.0, 0.0), p2(2.0, 2.0)),
            0.5,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.pgm");
        write_gridmap(&path, &grid).unwrap();
        let side = path.with_extension("json");
        let text = fs::read_to_string(&side)
            .unwrap()
            .replace("\"resolution\": 0.5", "\"resolution\": -1.0");
        fs::write(&side, text).unwrap();
        assert!(matches!(
            read_gridmap(&path),
            Err(CliError::SidecarMismatch { .. })
        ));
    }

    #[test]
    fn wrong_maxval_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.pgm");
        write_pgm(
            &path,
            &Pgm {
                width: 2,
                height: 2,
                maxval: 99,
                data: vec![0, 1, 2, 3],
            },
        )
        .unwrap();
        fs::write(
            path.with_extension("json"),
            r#"{"resolution":0.2,"origin":[0,0],"width":2,"height":2}"#,
        )
        .unwrap();
        match read_gridmap(&path) {
            Err(CliError::PgmMaxval { maxval: 99, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn elevation_map_roundtrip_within_quantization() {
        let mut emap = ElevationMap::from_heights(
            20,
            16,
            0.01,
            p2(-0.05, 0.0),
            vec![0.0; 320],
        )
        .unwrap();
        for r in 4..10u32 {
            for c in 5..12u32 {
                emap.set(c, r, -0.05 + 0.001 * (c as f64));
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emap.pgm");
        write_elevation_map(&path, &emap).unwrap();
        let back = read_elevation_map(&path).unwrap();
        assert_eq!(back.width, emap.width);
        let quantum = 0.05 / 65534.0;
        for r in 0..16u32 {
            for c in 0..20u32 {
                let (a, b) = (emap.height_at(c, r), back.height_at(c, r));
                match (a, b) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= quantum),
                    (None, None) => {}
                    other => panic!("missing mismatch {other:?}"),
                }
            }
        }
    }
}
