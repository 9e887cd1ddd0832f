//! Vibration degree and speed sweeps.

use alloc::string::String;
use alloc::vec::Vec;

use super::{
    extract_track_profiles, simulate_traversal, Result, RideModel, TrackProfile, VibrationError,
    VibrationTrace,
};
use crate::math::Point2;
use crate::planning::VehicleModel;
use crate::twin::SceneAssets;

#[allow(unused_imports)]
use num_traits::Float;

/// RMS and peak of the per-step vibration degree.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VibrationDegree {
    pub g_rms: f64,
    pub g_peak: f64,
}

/// One sweep row: a defect section traversed at one speed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VibrationSummary {
    pub defect: String,
    pub speed_kmh: f64,
    pub g_rms: f64,
    pub g_peak: f64,
}

/// Per-step vibration degree `g_i = sqrt(wx^2 + wy^2 + alpha az^2)`.
pub fn g_series(trace: &VibrationTrace, alpha: f64) -> Vec<f64> {
    trace
        .roll_rate
        .iter()
        .zip(trace.pitch_rate.iter())
        .zip(trace.az.iter())
        .map(|((&wx, &wy), &az)| (wx * wx + wy * wy + alpha * az * az).sqrt())
        .collect()
}

/// Reduces a trace to its vibration degree (RMS primary, peak secondary).
pub fn vibration_degree(trace: &VibrationTrace, alpha: f64) -> Result<VibrationDegree> {
    assert!(alpha >= 0.0, "alpha must be nonnegative");
    if trace.is_empty() {
        return Err(VibrationError::EmptyTrace);
    }
    let g = g_series(trace, alpha);
    let rms = (g.iter().map(|x| x * x).sum::<f64>() / g.len() as f64).sqrt();
    let peak = g.iter().cloned().fold(0.0, f64::max);
    Ok(VibrationDegree {
        g_rms: rms,
        g_peak: peak,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    pub rows: Vec<VibrationSummary>,
    /// Speed minimizing g_rms (ties go to the lowest speed).
    pub best_speed_kmh: f64,
}

/// Sweeps speeds over a prepared track profile.
pub fn sweep_profile(
    profile: &TrackProfile,
    defect: &str,
    speeds: &[f64],
    alpha: f64,
    vehicle: &VehicleModel,
    model: &RideModel,
) -> Result<SweepResult> {
    if speeds.is_empty() || speeds.iter().any(|&s| s <= 0.0) {
        return Err(VibrationError::InvalidSpeeds);
    }
    let mut rows = Vec::with_capacity(speeds.len());
    for &speed in speeds {
        let trace = simulate_traversal(profile, speed, vehicle, model)?;
        let degree = vibration_degree(&trace, alpha)?;
        rows.push(VibrationSummary {
            defect: String::from(defect),
            speed_kmh: speed,
            g_rms: degree.g_rms,
            g_peak: degree.g_peak,
        });
    }
    let best = rows
        .iter()
        .min_by(|a, b| {
            a.g_rms
                .total_cmp(&b.g_rms)
                .then(a.speed_kmh.total_cmp(&b.speed_kmh))
        })
        .expect("speeds nonempty");
    Ok(SweepResult {
        best_speed_kmh: best.speed_kmh,
        rows,
    })
}

/// Extracts the wheel-track profile for a scene trajectory and sweeps the
/// given speeds. The profile step is fixed in distance, so higher speeds
/// automatically integrate at finer time steps.
#[allow(clippy::too_many_arguments)]
pub fn speed_sweep(
    assets: &SceneAssets,
    defect: &str,
    start: Point2,
    end: Point2,
    vehicle: &VehicleModel,
    ds: f64,
    speeds: &[f64],
    alpha: f64,
    model: &RideModel,
) -> Result<SweepResult> {
    let profile = extract_track_profiles(assets, start, end, vehicle, ds)?;
    sweep_profile(&profile, defect, speeds, alpha, vehicle, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(az: Vec<f64>, wx: Vec<f64>, wy: Vec<f64>) -> VibrationTrace {
        VibrationTrace {
            dt: 0.01,
            az,
            roll_rate: wx,
            pitch_rate: wy,
        }
    }

    #[test]
    fn zero_trace_zero_degree() {
        let t = trace(alloc::vec![0.0; 10], alloc::vec![0.0; 10], alloc::vec![0.0; 10]);
        let d = vibration_degree(&t, 0.1).unwrap();
        assert_eq!(d.g_rms, 0.0);
        assert_eq!(d.g_peak, 0.0);
    }

    #[test]
    fn three_four_five_step() {
        let t = trace(alloc::vec![0.0], alloc::vec![3.0], alloc::vec![4.0]);
        let d = vibration_degree(&t, 0.1).unwrap();
        assert!((d.g_peak - 5.0).abs() < 1e-12);
        assert!((d.g_rms - 5.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_weighting_of_az() {
        let t = trace(alloc::vec![10.0], alloc::vec![0.0], alloc::vec![0.0]);
        let d = vibration_degree(&t, 0.1).unwrap();
        assert!((d.g_peak - 10.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_trace_rejected() {
        let t = trace(alloc::vec![], alloc::vec![], alloc::vec![]);
        assert!(matches!(
            vibration_degree(&t, 0.1),
            Err(VibrationError::EmptyTrace)
        ));
    }

    #[test]
    fn g_monotone_in_alpha_and_scales_exactly() {
        let t = trace(
            alloc::vec![1.0, -2.0, 0.5],
            alloc::vec![0.3, 0.0, -0.4],
            alloc::vec![0.1, 0.2, 0.0],
        );
        let d1 = vibration_degree(&t, 0.05).unwrap();
        let d2 = vibration_degree(&t, 0.1).unwrap();
        let d3 = vibration_degree(&t, 0.5).unwrap();
        assert!(d1.g_rms <= d2.g_rms && d2.g_rms <= d3.g_rms);
        // Doubling every channel doubles every g_i exactly.
        let doubled = trace(
            t.az.iter().map(|x| 2.0 * x).collect(),
            t.roll_rate.iter().map(|x| 2.0 * x).collect(),
            t.pitch_rate.iter().map(|x| 2.0 * x).collect(),
        );
        let g1 = g_series(&t, 0.1);
        let g2 = g_series(&doubled, 0.1);
        for (a, b) in g1.iter().zip(g2.iter()) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn flat_profile_ties_resolve_to_lowest_speed() {
        let profile = TrackProfile::flat(40.0, 0.01, 0.0).unwrap();
        let sweep = sweep_profile(
            &profile,
            "flat",
            &[20.0, 5.0, 40.0],
            0.1,
            &VehicleModel::default(),
            &RideModel::default(),
        )
        .unwrap();
        assert_eq!(sweep.best_speed_kmh, 5.0);
    }

    #[test]
    fn deep_long_defect_prefers_slow_shallow_short_prefers_fast() {
        let vehicle = VehicleModel::default();
        let model = RideModel::default();
        let speeds = [5.0, 10.0, 20.0, 30.0, 40.0];
        let deep = TrackProfile::with_pit(
            40.0,
            0.01,
            18.0,
            1.5,
            0.12,
            [true, false, true, false],
        )
        .unwrap();
        let deep_sweep =
            sweep_profile(&deep, "deep", &speeds, 0.1, &vehicle, &model).unwrap();
        assert_eq!(deep_sweep.best_speed_kmh, 5.0, "{:?}", deep_sweep.rows);

        let shallow = TrackProfile::with_pit(
            40.0,
            0.01,
            18.0,
            0.3,
            0.03,
            [true, false, true, false],
        )
        .unwrap();
        let shallow_sweep =
            sweep_profile(&shallow, "shallow", &speeds, 0.1, &vehicle, &model).unwrap();
        for w in shallow_sweep.rows.windows(2) {
            assert!(
                w[0].g_rms > w[1].g_rms,
                "strictly decreasing: {:?}",
                shallow_sweep.rows
            );
        }
        // The severe defect's best speed is never above the mild one's.
        assert!(deep_sweep.best_speed_kmh <= shallow_sweep.best_speed_kmh);
    }

    #[test]
    fn empty_speed_list_rejected() {
        let profile = TrackProfile::flat(40.0, 0.01, 0.0).unwrap();
        assert!(matches!(
            sweep_profile(
                &profile,
                "x",
                &[],
                0.1,
                &VehicleModel::default(),
                &RideModel::default()
            ),
            Err(VibrationError::InvalidSpeeds)
        ));
    }
}
