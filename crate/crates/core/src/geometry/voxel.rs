//! Voxel-grid downsampling.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math::{p3, Point3};

#[allow(unused_imports)]
use num_traits::Float;

/// Replaces every occupied `leaf`-sized voxel by the centroid of its points.
///
/// Output order is deterministic (sorted by voxel key); an empty cloud
/// yields an empty output. `leaf` must be positive.
pub fn voxel_downsample(cloud: &[Point3], leaf: f64) -> Vec<Point3> {
    assert!(leaf > 0.0, "voxel leaf size must be positive");
    let mut cells: BTreeMap<(i64, i64, i64), (Point3, usize)> = BTreeMap::new();
    for p in cloud {
        let key = (
            (p.x / leaf).floor() as i64,
            (p.y / leaf).floor() as i64,
            (p.z / leaf).floor() as i64,
        );
        let entry = cells.entry(key).or_insert((Point3::ZERO, 0));
        entry.0 = entry.0.add(*p);
        entry.1 += 1;
    }
    cells
        .into_values()
        .map(|(sum, count)| {
            let inv = 1.0 / count as f64;
            p3(sum.x * inv, sum.y * inv, sum.z * inv)
        })
        .collect()
}
