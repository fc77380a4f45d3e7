//! SVG rendering of learning curves and trajectories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{read_curve, CurveRow, HarnessError, MeanStd};
use crate::sim::trajectory::Trajectory;
use crate::Vec2;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Linear map from data ranges onto the plotting area.
struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn fit(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let mut xs = xs;
        let mut ys = ys;
        Self {
            x: range(&mut xs),
            y: range(&mut ys),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn frame(&self, svg: &mut String, title: &str, ylabel: &str) {
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = write!(
            svg,
            r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            r - l,
            b - t
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{title}</text>"#,
            WIDTH / 2.0,
            t - 15.0
        );
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">episode</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0
        );
        let _ = write!(
            svg,
            r#"<text x="14" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {})">{ylabel}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let _ = write!(
                svg,
                r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">{xv:.0}</text>"#,
                self.px(xv),
                b + 14.0
            );
            let _ = write!(
                svg,
                r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="10">{yv:.3}</text>"#,
                l - 4.0,
                self.py(yv) + 3.0
            );
        }
    }

    fn polyline(&self, pts: &[(f64, f64)], stroke: &str, extra: &str) -> String {
        let coords: Vec<String> = pts
            .iter()
            .filter(|(_, y)| y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", self.px(*x), self.py(*y)))
            .collect();
        format!(
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5" {extra}/>"#,
            coords.join(" ")
        )
    }
}

fn document(body: &str, width: f64, height: f64, view: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"{view}\">\n<rect x=\"-10000\" y=\"-10000\" width=\"20000\" height=\"20000\" fill=\"white\"/>\n{body}\n</svg>\n"
    )
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Per-seed learning curves overlaid in one chart.
pub fn curves_svg(curves: &[(String, Vec<CurveRow>)]) -> String {
    let axes = Axes::fit(
        curves.iter().flat_map(|(_, r)| r.iter().map(|r| r.episode as f64)),
        curves.iter().flat_map(|(_, r)| r.iter().map(|r| r.eval_return_mean)),
    );
    let mut body = String::new();
    axes.frame(&mut body, "Evaluation return per seed", "return");
    for (i, (label, rows)) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.episode as f64, r.eval_return_mean)).collect();
        body.push_str(&axes.polyline(&pts, color(i), &format!(r#"data-label="{label}""#)));
        let _ = write!(
            body,
            r#"<text x="{}" y="{}" font-size="10" fill="{}">{label}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 12.0 * (i as f64 + 1.0),
            color(i)
        );
    }
    document(&body, WIDTH, HEIGHT, &format!("0 0 {WIDTH} {HEIGHT}"))
}

/// Mean and population standard deviation across curves sharing one grid.
pub fn band(curves: &[(String, Vec<CurveRow>)]) -> Vec<(u64, MeanStd)> {
    let Some((_, first)) = curves.first() else {
        return Vec::new();
    };
    first
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let vals: Vec<f64> = curves.iter().map(|(_, r)| r[k].eval_return_mean).collect();
            (row.episode, MeanStd::of(&vals))
        })
        .collect()
}

/// Mean curve with a shaded ±1 std band.
pub fn band_svg(curves: &[(String, Vec<CurveRow>)]) -> String {
    let stats = band(curves);
    let axes = Axes::fit(
        stats.iter().map(|(e, _)| *e as f64),
        stats.iter().flat_map(|(_, m)| [m.mean - m.std, m.mean + m.std]),
    );
    let mut body = String::new();
    axes.frame(&mut body, "Evaluation return, mean ± std across seeds", "return");
    let upper: Vec<String> = stats
        .iter()
        .map(|(e, m)| format!("{:.2},{:.2}", axes.px(*e as f64), axes.py(m.mean + m.std)))
        .collect();
    let lower: Vec<String> = stats
        .iter()
        .rev()
        .map(|(e, m)| format!("{:.2},{:.2}", axes.px(*e as f64), axes.py(m.mean - m.std)))
        .collect();
    let _ = write!(
        body,
        r#"<polygon points="{} {}" fill="{}" fill-opacity="0.25" stroke="none"/>"#,
        upper.join(" "),
        lower.join(" "),
        color(0)
    );
    let mean: Vec<(f64, f64)> = stats.iter().map(|(e, m)| (*e as f64, m.mean)).collect();
    body.push_str(&axes.polyline(&mean, color(0), ""));
    document(&body, WIDTH, HEIGHT, &format!("0 0 {WIDTH} {HEIGHT}"))
}

/// Reads the curve CSVs, checks they share an episode grid, and writes
/// `curves.svg` (plus `band.svg` for two or more inputs) into `out_dir`.
pub fn plot_curves(inputs: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut curves = Vec::with_capacity(inputs.len());
    for p in inputs {
        let label = p
            .parent()
            .and_then(|d| d.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string());
        curves.push((label, read_curve(p)?));
    }
    if let Some((_, first)) = curves.first() {
        let grid: Vec<u64> = first.iter().map(|r| r.episode).collect();
        let offending: Vec<String> = inputs
            .iter()
            .zip(&curves)
            .filter(|(_, (_, rows))| rows.iter().map(|r| r.episode).ne(grid.iter().copied()))
            .map(|(p, _)| p.display().to_string())
            .collect();
        if !offending.is_empty() {
            return Err(HarnessError::MismatchedCurves(format!(
                "{} differ from {}",
                offending.join(", "),
                inputs[0].display()
            )));
        }
    }
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut written = Vec::new();
    let path = out_dir.join("curves.svg");
    write(&path, &curves_svg(&curves))?;
    written.push(path);
    if curves.len() > 1 {
        let path = out_dir.join("band.svg");
        write(&path, &band_svg(&curves))?;
        written.push(path);
    }
    Ok(written)
}

/// Robot goal, taken as the antipode of its start on the crossing circle.
pub fn inferred_goal(traj: &Trajectory) -> Option<Vec2> {
    traj.path(0).first().map(|p| -p)
}

/// Top-down view of one episode in world coordinates (y up): robot in
/// black, pedestrians in palette colors, the robot goal as a ring of radius
/// `goal_tolerance`.
pub fn trajectory_svg(traj: &Trajectory, goal_tolerance: f64) -> String {
    let paths: Vec<Vec<Vec2>> = (0..traj.agent_count()).map(|id| traj.path(id)).collect();
    let extent = paths
        .iter()
        .flatten()
        .fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
        + 1.0;
    let mut body = String::from(r#"<g transform="scale(1,-1)">"#);
    let fmt = |pts: &[Vec2]| {
        pts.iter()
            .map(|p| format!("{:.4},{:.4}", p.x, p.y))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (id, pts) in paths.iter().enumerate().skip(1) {
        let c = color(id - 1);
        let _ = write!(
            body,
            r#"<polyline class="pedestrian" points="{}" fill="none" stroke="{c}" stroke-width="0.04"/>"#,
            fmt(pts)
        );
        if let Some(p) = pts.last() {
            let _ = write!(body, r#"<circle cx="{:.4}" cy="{:.4}" r="0.3" fill="none" stroke="{c}" stroke-width="0.02"/>"#, p.x, p.y);
        }
    }
    if let Some(robot) = paths.first() {
        let _ = write!(
            body,
            r#"<polyline class="robot" points="{}" fill="none" stroke="black" stroke-width="0.06"/>"#,
            fmt(robot)
        );
        if let Some(g) = inferred_goal(traj) {
            let _ = write!(
                body,
                r#"<circle class="goal" cx="{:.4}" cy="{:.4}" r="{goal_tolerance}" fill="none" stroke="black" stroke-dasharray="0.1 0.05" stroke-width="0.03"/>"#,
                g.x, g.y
            );
        }
    }
    body.push_str("</g>");
    let _ = write!(
        body,
        r#"<text x="{:.2}" y="{:.2}" font-size="0.4">{}</text>"#,
        -extent + 0.2,
        -extent + 0.5,
        traj.outcome().as_str()
    );
    let side = 2.0 * extent;
    document(&body, 480.0, 480.0, &format!("{} {} {side} {side}", -extent, -extent))
}

/// Renders each trajectory CSV to an SVG of the same stem in `out_dir`.
pub fn plot_trajectories(inputs: &[PathBuf], out_dir: &Path, goal_tolerance: f64) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut written = Vec::new();
    for p in inputs {
        let traj = Trajectory::read_csv(p).map_err(|e| HarnessError::csv(p, e))?;
        let stem = p.file_stem().map_or("trajectory".into(), |s| s.to_string_lossy().into_owned());
        let path = out_dir.join(format!("{stem}.svg"));
        write(&path, &trajectory_svg(&traj, goal_tolerance))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(episode: u64, ret: f64) -> CurveRow {
        CurveRow {
            episode,
            eval_return_mean: ret,
            eval_success: 0.5,
            eval_collision: 0.5,
            eval_timeout: 0.0,
            exec_time_mean: 10.0,
            alpha: 0.1,
            sigma_delta_last: 1.0,
        }
    }

    #[test]
    fn identical_curves_have_zero_width_band() {
        let rows: Vec<CurveRow> = (1..=5).map(|k| row(100 * k, 0.1 * k as f64)).collect();
        let curves: Vec<_> = (0..5).map(|i| (format!("s{i}"), rows.clone())).collect();
        for (_, m) in band(&curves) {
            assert_eq!(m.std, 0.0);
        }
    }

    #[test]
    fn curves_svg_has_one_polyline_per_seed() {
        let a: Vec<CurveRow> = (1..=3).map(|k| row(100 * k, k as f64)).collect();
        let svg = curves_svg(&[("a".into(), a.clone()), ("b".into(), a)]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg"));
    }
}
