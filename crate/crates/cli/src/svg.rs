//! Minimal hand-rolled SVG emitters: polyline charts and map overlays.
//! Deterministic output, no timestamps.

use std::fmt::Write as _;

use roadtwin_core::planning::{CellState, GridMap, Pose, VehicleModel, wheel_poses};

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Line chart of one or more (x, y) series.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> String {
    let (w, h) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (_, pts) in series {
        for &(x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin).abs() < 1e-12 {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin).abs() < 1e-12 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
        w / 2.0
    )
    .unwrap();
    // Axes.
    writeln!(
        out,
        r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - mb,
        w - mr,
        h - mb
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#,
        h - mb
    )
    .unwrap();
    for (value, x_axis) in [(xmin, true), (xmax, true), (ymin, false), (ymax, false)] {
        if x_axis {
            writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{value:.3}</text>"#,
                sx(value),
                h - mb + 18.0
            )
            .unwrap();
        } else {
            writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{value:.4}</text>"#,
                ml - 6.0,
                sy(value) + 4.0
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>"#,
        (ml + w - mr) / 2.0,
        h - 12.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{y_label}</text>"#,
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    )
    .unwrap();
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", sx(x), sy(y))).collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        for &(x, y) in pts {
            writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"#,
                sx(x),
                sy(y)
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{name}</text>"#,
            w - mr - 120.0,
            mt + 16.0 * i as f64
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Grid map overlay with the planned path and the four wheel tracks.
pub fn map_overlay(grid: &GridMap, path: &[Pose], vehicle: &VehicleModel) -> String {
    let scale = (900.0 / (grid.width.max(grid.height) as f64)).min(12.0);
    let w = grid.width as f64 * scale;
    let h = grid.height as f64 * scale;
    // World y grows up; SVG y grows down.
    let px = |x: f64| (x - grid.origin.x) / grid.resolution * scale;
    let py = |y: f64| h - (y - grid.origin.y) / grid.resolution * scale;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r##"<rect width="{w}" height="{h}" fill="#8c8c8c"/>"##).unwrap();
    // Free cells in white (run-length merged per row), defects on top.
    for (state, color) in [(CellState::Free, "white"), (CellState::Defect, "#222222")] {
        for r in 0..grid.height {
            let mut c = 0;
            while c < grid.width {
                if grid.state(c, r) == state {
                    let start = c;
                    while c < grid.width && grid.state(c, r) == state {
                        c += 1;
                    }
                    writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{scale}" fill="{color}"/>"#,
                        start as f64 * scale,
                        h - (r + 1) as f64 * scale,
                        (c - start) as f64 * scale,
                    )
                    .unwrap();
                } else {
                    c += 1;
                }
            }
        }
    }
    if path.len() >= 2 {
        for wheel in 0..4 {
            let pts: Vec<String> = path
                .iter()
                .map(|p| {
                    let wp = wheel_poses(*p, vehicle)[wheel];
                    format!("{},{}", px(wp.x), py(wp.y))
                })
                .collect();
            writeln!(
                out,
                r##"<polyline fill="none" stroke="#2ca02c" stroke-width="1" stroke-dasharray="3,3" points="{}"/>"##,
                pts.join(" ")
            )
            .unwrap();
        }
        let pts: Vec<String> = path
            .iter()
            .map(|p| format!("{},{}", px(p.x), py(p.y)))
            .collect();
        writeln!(
            out,
            r##"<polyline fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##,
            pts.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use roadtwin_core::math::p2;
    use roadtwin_core::planning::{rasterize, MapBounds};

    #[test]
    fn chart_is_deterministic_and_wellformed() {
        let series = vec![(
            "g_rms".to_string(),
            vec![(5.0, 0.4), (10.0, 0.3), (20.0, 0.2)],
        )];
        let a = line_chart("sweep", "speed", "g", &series);
        let b = line_chart("sweep", "speed", "g", &series);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn overlay_renders_path() {
        let road = vec![p2(0.0, 0.0), p2(8.0, 0.0), p2(8.0, 4.0), p2(0.0, 4.0)];
        let grid = rasterize(
            &[road],
            &[],
            MapBounds::new(p2(0.0, 0.0), p2(8.0, 4.0)),
            0.2,
        )
        .unwrap();
        let path = vec![Pose::new(1.0, 2.0, 0.0), Pose::new(7.0, 2.0, 0.0)];
        let svg = map_overlay(&grid, &path, &VehicleModel::default());
        assert!(svg.contains("stroke=\"#d62728\""));
        assert!(svg.ends_with("</svg>\n"));
    }
}
