//! Per-command run configurations: JSON files with strict keys, range
//! checks at load, and dotted-path `--set key=value` overrides.

use std::fs;
use std::path::{Path, PathBuf};

use roadtwin_core::math::{p2, Point2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{io_err, CliError, Result};

/// Loads a config file, applies `--set` overrides, then deserializes with
/// unknown keys rejected.
pub fn load_config<T: DeserializeOwned>(path: &Path, sets: &[String]) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    for set in sets {
        apply_set(&mut value, set)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// Applies one `key.path=value` override; the value parses as JSON when
/// possible and falls back to a string.
pub fn apply_set(root: &mut Value, set: &str) -> Result<()> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set needs key=value, got {set:?}")))?;
    let parsed = serde_json::from_str::<Value>(raw).unwrap_or(Value::String(raw.to_string()));
    let mut cursor = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            match cursor {
                Value::Object(map) => {
                    map.insert(part.to_string(), parsed);
                    return Ok(());
                }
                _ => return Err(CliError::Config(format!("{key:?} is not an object path"))),
            }
        }
        cursor = match cursor {
            Value::Object(map) => map
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default())),
            _ => return Err(CliError::Config(format!("{key:?} is not an object path"))),
        };
    }
    Ok(())
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

// ---------------------------------------------------------------------------
// reconstruct-surface

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskRef {
    pub pgm: PathBuf,
    /// 3x4 world-to-pixel projection, row major.
    pub projection: [[f64; 4]; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub cloud: PathBuf,
    #[serde(default)]
    pub mask: Option<MaskRef>,
    #[serde(default = "default_leaf")]
    pub leaf: f64,
    pub library: PathBuf,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_leaf() -> f64 {
    roadtwin_core::model::DEFAULT_SURFACE_LEAF
}

impl SurfaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.leaf <= 0.0 {
            return Err(err(format!("leaf must be positive, got {}", self.leaf)));
        }
        if !crate::library::valid_entry_name(&self.name) {
            return Err(err(format!("entry name {:?} not filesystem-safe", self.name)));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// reconstruct-defect

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectConfig {
    /// 16-bit PGM elevation map (JSON sidecar alongside).
    pub elevation_map: PathBuf,
    pub library: PathBuf,
    pub name_prefix: String,
    #[serde(default = "default_depth_threshold")]
    pub depth_threshold: f64,
    #[serde(default = "default_min_area")]
    pub min_area: f64,
    #[serde(default = "default_stride")]
    pub stride: u32,
}

fn default_depth_threshold() -> f64 {
    roadtwin_core::model::DEFAULT_DEPTH_THRESHOLD
}

fn default_min_area() -> f64 {
    0.005
}

fn default_stride() -> u32 {
    roadtwin_core::model::DEFAULT_SAMPLE_STRIDE
}

impl DefectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth_threshold >= 0.0 {
            return Err(err("depth_threshold must be negative"));
        }
        if self.min_area < 0.0 {
            return Err(err("min_area must be nonnegative"));
        }
        if self.stride == 0 {
            return Err(err("stride must be at least 1"));
        }
        if !crate::library::valid_entry_name(&self.name_prefix) {
            return Err(err(format!(
                "name_prefix {:?} not filesystem-safe",
                self.name_prefix
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// generate-scene

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneGenConfig {
    /// JSON file: [{"id": ..., "polygon": [[x, y], ...]}, ...].
    pub segments: PathBuf,
    pub library: PathBuf,
    /// Surface entry name for elevation restoration (optional).
    #[serde(default)]
    pub surface: Option<String>,
    pub count: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scale_range")]
    pub scale_range: (f64, f64),
    /// Yaw range in radians.
    #[serde(default = "default_yaw_range")]
    pub yaw_range: (f64, f64),
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    /// Interior refinement spacing for segment meshes, meters (0 = none).
    #[serde(default = "default_mesh_max_edge")]
    pub mesh_max_edge: f64,
    #[serde(default = "default_true")]
    pub validate: bool,
    pub out: PathBuf,
}

fn default_scale_range() -> (f64, f64) {
    (0.5, 1.5)
}

fn default_yaw_range() -> (f64, f64) {
    (0.0, 2.0 * std::f64::consts::PI)
}

fn default_max_attempts() -> u32 {
    200
}

fn default_mesh_max_edge() -> f64 {
    2.0
}

fn default_true() -> bool {
    true
}

impl SceneGenConfig {
    pub fn placement(&self) -> roadtwin_core::twin::PlacementConfig {
        roadtwin_core::twin::PlacementConfig {
            scale_range: self.scale_range,
            yaw_range: self.yaw_range,
            max_attempts: self.max_attempts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale_range.0 <= 0.0 || self.scale_range.1 < self.scale_range.0 {
            return Err(err("scale_range must be positive and ordered"));
        }
        if self.yaw_range.1 < self.yaw_range.0 {
            return Err(err("yaw_range must be ordered"));
        }
        if self.max_attempts == 0 {
            return Err(err("max_attempts must be positive"));
        }
        if self.mesh_max_edge < 0.0 {
            return Err(err("mesh_max_edge must be nonnegative"));
        }
        Ok(())
    }
}

/// One road segment outline as stored in the segments JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub id: String,
    pub polygon: Vec<[f64; 2]>,
}

pub fn load_segments(path: &Path) -> Result<Vec<SegmentSpec>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let specs: Vec<SegmentSpec> = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    if specs.is_empty() {
        return Err(err(format!("{}: no segments", path.display())));
    }
    Ok(specs)
}

// ---------------------------------------------------------------------------
// rasterize

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterizeConfig {
    /// Scene output directory (reads its manifest.json).
    pub scene: PathBuf,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub out: PathBuf,
}

fn default_resolution() -> f64 {
    roadtwin_core::planning::DEFAULT_RESOLUTION
}

fn default_margin() -> f64 {
    2.0
}

impl RasterizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution <= 0.0 {
            return Err(err("resolution must be positive"));
        }
        if self.margin < 0.0 {
            return Err(err("margin must be nonnegative"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// plan

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum MapSource {
    /// PGM grid map (with sidecar) written by `rasterize`.
    Gridmap { path: PathBuf },
    /// Inline polygons rasterized on the fly.
    Polygons {
        roads: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        defects: Vec<Vec<[f64; 2]>>,
        #[serde(default = "default_resolution")]
        resolution: f64,
        #[serde(default = "default_margin")]
        margin: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    #[serde(default = "default_vehicle_width")]
    pub width: f64,
    #[serde(default = "default_wheelbase")]
    pub wheelbase: f64,
    #[serde(default = "default_wheel_radius")]
    pub wheel_radius: f64,
}

fn default_vehicle_width() -> f64 {
    2.0
}
fn default_wheelbase() -> f64 {
    3.0
}
fn default_wheel_radius() -> f64 {
    0.15
}

impl Default for VehicleConfig {
    fn default() -> Self {
        VehicleConfig {
            width: default_vehicle_width(),
            wheelbase: default_wheelbase(),
            wheel_radius: default_wheel_radius(),
        }
    }
}

impl VehicleConfig {
    pub fn model(&self) -> roadtwin_core::planning::VehicleModel {
        roadtwin_core::planning::VehicleModel {
            width: self.width,
            wheelbase: self.wheelbase,
            wheel_radius: self.wheel_radius,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadFrameConfig {
    pub origin: [f64; 2],
    pub heading: f64,
    pub length: f64,
    #[serde(default = "default_max_lateral")]
    pub max_lateral: f64,
}

fn default_max_lateral() -> f64 {
    3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub map: MapSource,
    /// [x, y, yaw].
    pub start: [f64; 3],
    pub goal: [f64; 3],
    /// astar | rrtstar | lattice | hybrid_astar.
    pub planner: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub reference_length: Option<f64>,
    #[serde(default)]
    pub road_frame: Option<RoadFrameConfig>,
    #[serde(default)]
    pub vehicle: Option<VehicleConfig>,
    #[serde(default = "default_true")]
    pub svg: bool,
    pub out: PathBuf,
}

fn default_max_iters() -> usize {
    5000
}

impl PlanConfig {
    pub fn validate(&self) -> Result<()> {
        match self.planner.as_str() {
            "astar" | "rrtstar" | "lattice" | "hybrid_astar" => {}
            other => return Err(err(format!("unknown planner {other:?}"))),
        }
        if self.planner == "lattice" && self.road_frame.is_none() {
            return Err(err("lattice planner needs road_frame"));
        }
        if self.max_iters == 0 {
            return Err(err("max_iters must be positive"));
        }
        if let Some(r) = self.reference_length {
            if r <= 0.0 {
                return Err(err("reference_length must be positive"));
            }
        }
        Ok(())
    }

    pub fn start_pose(&self) -> roadtwin_core::planning::Pose {
        roadtwin_core::planning::Pose::new(self.start[0], self.start[1], self.start[2])
    }

    pub fn goal_pose(&self) -> roadtwin_core::planning::Pose {
        roadtwin_core::planning::Pose::new(self.goal[0], self.goal[1], self.goal[2])
    }
}

pub fn polygon(points: &[[f64; 2]]) -> Vec<Point2> {
    points.iter().map(|p| p2(p[0], p[1])).collect()
}

// ---------------------------------------------------------------------------
// vibration-sweep

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub id: String,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Scene OBJ file (or a scene output directory containing scene.obj).
    pub scene: PathBuf,
    pub sections: Vec<SweepSection>,
    pub speeds: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_ds")]
    pub ds: f64,
    #[serde(default)]
    pub vehicle: Option<VehicleConfig>,
    /// Per-wheel suspension low-pass (on by default).
    #[serde(default = "default_true")]
    pub suspension: bool,
    #[serde(default = "default_suspension_freq")]
    pub suspension_freq_hz: f64,
    #[serde(default = "default_suspension_damping")]
    pub suspension_damping: f64,
    /// Optional raw impulse feed into the acceleration channel.
    #[serde(default)]
    pub impulse_feed: f64,
    pub out: PathBuf,
}

fn default_alpha() -> f64 {
    roadtwin_core::vibration::DEFAULT_ALPHA
}

fn default_ds() -> f64 {
    roadtwin_core::vibration::DEFAULT_PROFILE_STEP
}

fn default_suspension_freq() -> f64 {
    1.5
}

fn default_suspension_damping() -> f64 {
    0.7
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.speeds.is_empty() || self.speeds.iter().any(|&s| s <= 0.0) {
            return Err(err("speeds must be nonempty and positive"));
        }
        if self.ds <= 0.0 {
            return Err(err("ds must be positive"));
        }
        if self.alpha < 0.0 {
            return Err(err("alpha must be nonnegative"));
        }
        if self.sections.is_empty() {
            return Err(err("at least one section required"));
        }
        Ok(())
    }

    pub fn ride_model(&self) -> roadtwin_core::vibration::RideModel {
        roadtwin_core::vibration::RideModel {
            gravity: roadtwin_core::vibration::GRAVITY,
            suspension: self.suspension.then_some(
                roadtwin_core::vibration::SuspensionParams {
                    natural_freq_hz: self.suspension_freq_hz,
                    damping_ratio: self.suspension_damping,
                },
            ),
            impulse_feed: self.impulse_feed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(
            &path,
            r#"{"scene": "s", "resolution": 0.2, "margin": 1.0, "out": "o", "bogus": 1}"#,
        )
        .unwrap();
        let got = load_config::<RasterizeConfig>(&path, &[]);
        assert!(matches!(got, Err(CliError::Json { .. })), "{got:?}");
    }

    #[test]
    fn set_overrides_apply() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"scene": "s", "out": "o"}"#).unwrap();
        let cfg: RasterizeConfig =
            load_config(&path, &["resolution=0.5".to_string(), "margin=3".to_string()]).unwrap();
        assert_eq!(cfg.resolution, 0.5);
        assert_eq!(cfg.margin, 3.0);
    }

    #[test]
    fn nested_set_path() {
        let mut v: Value = serde_json::json!({"a": {"b": 1}});
        apply_set(&mut v, "a.b=2").unwrap();
        apply_set(&mut v, "a.c=\"x\"").unwrap();
        assert_eq!(v["a"]["b"], 2);
        assert_eq!(v["a"]["c"], "x");
    }

    #[test]
    fn range_checks() {
        let cfg = RasterizeConfig {
            scene: "s".into(),
            resolution: -1.0,
            margin: 0.0,
            out: "o".into(),
        };
        assert!(cfg.validate().is_err());
    }
}
