//! Fixed-view coverage study and planner comparisons.
//!
//! For a fixed camera `v`, `k[v][t]` is the fraction of query points it
//! sees at step `t`, and its coverage is the fraction of steps with
//! `k[v][t] ≥ θ`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geom3d::{CameraIntrinsics, Pose, Vec3};
use crate::mesh::{Bvh, DEFAULT_SEGMENT_EPS};
use crate::reward::point_visibility;
use crate::sim::{build_robot_meshes, run_episode, Bundle, EpisodeConfig, ViewGridSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct FixedViewGrid {
    pub poses: Vec<Pose>,
}

impl FixedViewGrid {
    pub fn authored(poses: Vec<Pose>) -> Result<Self, SimError> {
        if poses.is_empty() {
            return Err(SimError::Scene("view grid needs at least one pose".into()));
        }
        let finite = |p: &Pose| p.position.iter().chain(p.rotation.wxyz().iter()).all(|x| x.is_finite());
        if let Some(i) = poses.iter().position(|p| !finite(p)) {
            return Err(SimError::Scene(format!("view {i} is not finite")));
        }
        Ok(FixedViewGrid { poses })
    }

    /// `count` cameras on a circle of `radius` around `center` at absolute
    /// height `height`, each looking at `center`.
    pub fn ring(center: Vec3, radius: f64, height: f64, count: usize, start_angle: f64) -> Result<Self, SimError> {
        if count == 0 || !(radius > 0.0) {
            return Err(SimError::Scene(format!("ring needs count >= 1 and radius > 0, got {count} and {radius}")));
        }
        let poses = (0..count)
            .map(|i| {
                let a = start_angle + std::f64::consts::TAU * i as f64 / count as f64;
                let eye = Vec3::new(center.x + radius * a.cos(), center.y + radius * a.sin(), height);
                Ok(Pose::look_at(eye, center, Vec3::z())?)
            })
            .collect::<Result<_, SimError>>()?;
        Self::authored(poses)
    }

    pub fn from_spec(spec: &ViewGridSpec) -> Result<Self, SimError> {
        match spec {
            ViewGridSpec::Authored { poses } => {
                Self::authored(poses.iter().map(|p| p.to_pose()).collect::<Result<_, _>>()?)
            }
            ViewGridSpec::Ring { center, radius, height, count, start_angle } => {
                Self::ring(Vec3::from(*center), *radius, *height, *count, *start_angle)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }
}

/// Fraction of `points` visible from `pose`.
pub fn visibility_fraction<'a, I>(pose: &Pose, intr: &CameraIntrinsics, points: &[Vec3], meshes: I) -> f64
where
    I: IntoIterator<Item = &'a Bvh> + Clone,
{
    if points.is_empty() {
        return 0.0;
    }
    let seen = points.iter().filter(|q| point_visibility(pose, intr, q, meshes.clone(), DEFAULT_SEGMENT_EPS)).count();
    seen as f64 / points.len() as f64
}

/// `(1/T) Σ_t 1[k_t ≥ θ]`.
pub fn coverage(row: &[f64], threshold: f64) -> f64 {
    if row.is_empty() {
        return 0.0;
    }
    row.iter().filter(|k| **k >= threshold).count() as f64 / row.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMatrix {
    /// `fractions[v][t]`, views in original index order.
    pub fractions: Vec<Vec<f64>>,
    pub coverage: Vec<f64>,
    pub threshold: f64,
    /// View indices by descending coverage, ties by ascending index.
    pub order: Vec<usize>,
}

impl CoverageMatrix {
    pub fn new(fractions: Vec<Vec<f64>>, threshold: f64) -> Self {
        let coverage: Vec<f64> = fractions.iter().map(|row| coverage(row, threshold)).collect();
        let mut order: Vec<usize> = (0..fractions.len()).collect();
        order.sort_by(|&a, &b| coverage[b].total_cmp(&coverage[a]).then(a.cmp(&b)));
        CoverageMatrix { fractions, coverage, threshold, order }
    }

    pub fn max_coverage(&self) -> f64 {
        self.coverage.iter().cloned().fold(0.0, f64::max)
    }

    pub fn steps(&self) -> usize {
        self.fractions.first().map_or(0, Vec::len)
    }

    /// Rows in sorted view order: `view,threshold,coverage,t1,...,tT`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("view,threshold,coverage");
        for t in 1..=self.steps() {
            write!(out, ",t{t}").unwrap();
        }
        out.push('\n');
        for &v in &self.order {
            write!(out, "{v},{},{}", self.threshold, self.coverage[v]).unwrap();
            for k in &self.fractions[v] {
                write!(out, ",{k}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty csv")?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[..3] != ["view", "threshold", "coverage"] {
            return Err(format!("unexpected header {header:?}"));
        }
        let steps = cols.len() - 3;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut threshold = None;
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != steps + 3 {
                return Err(format!("row {} has {} fields, expected {}", n + 1, fields.len(), steps + 3));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", n + 1));
            let view = fields[0].parse::<usize>().map_err(|e| format!("row {}: {e}", n + 1))?;
            threshold = Some(num(fields[1])?);
            rows.push((view, fields[3..].iter().map(|s| num(s)).collect::<Result<_, _>>()?));
        }
        rows.sort_by_key(|(v, _)| *v);
        if rows.iter().enumerate().any(|(i, (v, _))| *v != i) {
            return Err("view indices must be 0..V".into());
        }
        let threshold = threshold.ok_or("no rows")?;
        Ok(CoverageMatrix::new(rows.into_iter().map(|(_, r)| r).collect(), threshold))
    }

    /// Heatmap of `k[v][t]`, rows in sorted order, dark green (0) to
    /// yellow (1).
    pub fn heatmap_svg(&self, timestamp: Option<&str>) -> String {
        let (cell, left, top) = (18.0, 90.0, 30.0);
        let w = left + cell * self.steps() as f64 + 20.0;
        let h = top + cell * self.order.len() as f64 + 30.0;
        let mut s = svg_open(w, h, timestamp);
        writeln!(s, r#"<text x="{left}" y="18" font-size="12">visible fraction per step (threshold {})</text>"#, self.threshold).unwrap();
        for (row, &v) in self.order.iter().enumerate() {
            let y = top + cell * row as f64;
            writeln!(
                s,
                r#"<text x="4" y="{:.1}" font-size="11">view {v} C={:.3}</text>"#,
                y + cell * 0.7,
                self.coverage[v]
            )
            .unwrap();
            for (t, k) in self.fractions[v].iter().enumerate() {
                let x = left + cell * t as f64;
                writeln!(s, r#"<rect x="{x:.1}" y="{y:.1}" width="{cell}" height="{cell}" fill="{}"/>"#, ramp(*k)).unwrap();
            }
        }
        s.push_str("</svg>\n");
        s
    }

    /// Bar chart of per-view coverage in sorted order.
    pub fn bars_svg(&self, timestamp: Option<&str>) -> String {
        let labels: Vec<String> = self.order.iter().map(|v| format!("view {v}")).collect();
        let values: Vec<f64> = self.order.iter().map(|&v| self.coverage[v]).collect();
        bar_chart("coverage per fixed view", &labels, &values, None, timestamp)
    }
}

fn svg_open(w: f64, h: f64, timestamp: Option<&str>) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n"
    );
    if let Some(ts) = timestamp {
        writeln!(s, "<!-- generated {ts} -->").unwrap();
    }
    s
}

/// Linear ramp from dark green `#006400` to yellow `#ffff00`.
pub fn ramp(k: f64) -> String {
    let k = k.clamp(0.0, 1.0);
    let r = (255.0 * k).round() as u8;
    let g = (100.0 + 155.0 * k).round() as u8;
    format!("#{r:02x}{g:02x}00")
}

/// Vertical bars scaled to `[0, max(1, values)]`, with optional error bars.
pub fn bar_chart(title: &str, labels: &[String], values: &[f64], errors: Option<&[f64]>, timestamp: Option<&str>) -> String {
    let (bar, gap, left, top, plot_h) = (50.0, 20.0, 40.0, 30.0, 200.0);
    let w = left + (bar + gap) * values.len() as f64 + gap;
    let h = top + plot_h + 40.0;
    let top_value = values.iter().cloned().fold(1.0, f64::max);
    let mut s = svg_open(w, h, timestamp);
    writeln!(s, r#"<text x="{left}" y="18" font-size="12">{title}</text>"#).unwrap();
    writeln!(s, r#"<line x1="{left}" y1="{:.1}" x2="{w:.1}" y2="{:.1}" stroke="black"/>"#, top + plot_h, top + plot_h).unwrap();
    for (i, (label, v)) in labels.iter().zip(values).enumerate() {
        let x = left + gap + (bar + gap) * i as f64;
        let bh = plot_h * v.max(0.0) / top_value;
        let y = top + plot_h - bh;
        writeln!(s, r##"<rect x="{x:.1}" y="{y:.1}" width="{bar}" height="{bh:.1}" fill="#2e8b57"/>"##).unwrap();
        if let Some(e) = errors.and_then(|e| e.get(i)) {
            let cx = x + bar / 2.0;
            let y0 = top + plot_h - plot_h * (v - e).max(0.0) / top_value;
            let y1 = top + plot_h - plot_h * (v + e) / top_value;
            writeln!(s, r#"<line x1="{cx:.1}" y1="{y0:.1}" x2="{cx:.1}" y2="{y1:.1}" stroke="black"/>"#).unwrap();
        }
        writeln!(s, r#"<text x="{x:.1}" y="{:.1}" font-size="11">{label}</text>"#, top + plot_h + 15.0).unwrap();
        writeln!(s, r#"<text x="{x:.1}" y="{:.1}" font-size="10">{v:.3}</text>"#, y - 3.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// `k[v][t]` for `t = 1..=L` from each fixed view, with the environment and
/// the robot capsule at step `t` as occluders.
pub fn compute_coverage(bundle: &Bundle, grid: &FixedViewGrid, threshold: f64) -> Result<CoverageMatrix, SimError> {
    let world = &bundle.world;
    let steps: Vec<usize> = (1..=world.episode_length).collect();
    let states: Vec<_> = steps.iter().map(|&t| bundle.ee.at(t)).collect();
    let robot = build_robot_meshes(&world.robot, &states)?;
    let points: Vec<Vec<Vec3>> = steps.iter().map(|&t| bundle.flow.points_at(t)).collect();
    let fractions = grid
        .poses
        .par_iter()
        .map(|pose| {
            (0..steps.len())
                .map(|i| visibility_fraction(pose, &world.intrinsics, &points[i], world.env.iter().chain(Some(&robot[i]))))
                .collect()
        })
        .collect();
    Ok(CoverageMatrix::new(fractions, threshold))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub label: String,
    pub mean_r_vis: f64,
    pub std_err: f64,
    pub seeds: Vec<u64>,
    /// Mean executed `r_vis` per seed.
    pub per_seed: Vec<f64>,
    pub slew_violations: usize,
    pub errors: usize,
}

impl ModeSummary {
    pub fn from_values(label: &str, seeds: Vec<u64>, per_seed: Vec<f64>) -> Self {
        let (mean, std_err) = mean_std_err(&per_seed);
        ModeSummary { label: label.into(), mean_r_vis: mean, std_err, seeds, per_seed, slew_violations: 0, errors: 0 }
    }
}

/// Mean and standard error (sample standard deviation over `√n`).
pub fn mean_std_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Seeds on which `a` strictly beats `b`.
pub fn paired_wins(a: &ModeSummary, b: &ModeSummary) -> usize {
    a.per_seed.iter().zip(&b.per_seed).filter(|(x, y)| x > y).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub modes: Vec<ModeSummary>,
    pub coverage: Option<CoverageMatrix>,
}

impl ComparisonReport {
    pub fn bars_svg(&self, timestamp: Option<&str>) -> String {
        let labels: Vec<String> = self.modes.iter().map(|m| m.label.clone()).collect();
        let values: Vec<f64> = self.modes.iter().map(|m| m.mean_r_vis).collect();
        let errors: Vec<f64> = self.modes.iter().map(|m| m.std_err).collect();
        bar_chart("mean executed visibility reward", &labels, &values, Some(&errors), timestamp)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,mean_r_vis,std_err,seeds\n");
        for m in &self.modes {
            writeln!(out, "{},{},{},{}", m.label, m.mean_r_vis, m.std_err, m.seeds.len()).unwrap();
        }
        out
    }
}

/// Runs every `(label, config)` over the same seeds and summarizes mean
/// executed `r_vis` per mode. Seeds run concurrently; results keep seed
/// order.
pub fn compare_planners(
    bundle: &Bundle,
    modes: &[(String, EpisodeConfig)],
    seeds: &[u64],
    views: Option<(&FixedViewGrid, f64)>,
) -> Result<ComparisonReport, SimError> {
    let mut summaries = Vec::new();
    for (label, cfg) in modes {
        let logs = seeds
            .par_iter()
            .map(|&s| run_episode(&bundle.world, &bundle.ee, &bundle.flow, cfg, s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut summary = ModeSummary::from_values(label, seeds.to_vec(), logs.iter().map(|l| l.mean_r_vis()).collect());
        summary.slew_violations = logs.iter().map(|l| l.slew_violations()).sum();
        summary.errors = logs.iter().filter(|l| l.error.is_some()).count();
        summaries.push(summary);
    }
    let coverage = views.map(|(grid, theta)| compute_coverage(bundle, grid, theta)).transpose()?;
    Ok(ComparisonReport { modes: summaries, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::quad_mesh;
    use proptest::prelude::*;

    fn intr() -> CameraIntrinsics {
        CameraIntrinsics::new(100.0, 100.0, 50.0, 50.0, 100, 100).unwrap()
    }

    #[test]
    fn fraction_examples() {
        let pts: Vec<Vec3> = (0..6).map(|i| Vec3::new(-0.25 + 0.1 * i as f64, 0.0, 1.0)).collect();
        let pose = Pose::identity();
        assert_eq!(visibility_fraction(&pose, &intr(), &pts, []), 1.0);
        let full = Bvh::build(quad_mesh(&Pose::from_translation(Vec3::new(0.0, 0.0, 0.5)), 1.0, 1.0));
        assert_eq!(visibility_fraction(&pose, &intr(), &pts, [&full]), 0.0);
        // Covers x < 0 at depth 0.5; the three left points' lines of sight
        // cross it, the right three do not.
        let half = Bvh::build(quad_mesh(&Pose::from_translation(Vec3::new(-0.5, 0.0, 0.5)), 0.5, 0.5));
        let blocked = pts.iter().filter(|q| q.x < 0.0).count();
        assert_eq!(blocked, 3);
        assert_eq!(visibility_fraction(&pose, &intr(), &pts, [&half]), 0.5);
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&[1.0; 8], 0.7), 1.0);
        assert_eq!(coverage(&[0.69; 8], 0.7), 0.0);
        assert_eq!(coverage(&[0.7; 8], 0.7), 1.0);
        let alt: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
        assert_eq!(coverage(&alt, 0.7), 0.5);
    }

    #[test]
    fn ordering_breaks_ties_by_index() {
        let m = CoverageMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]], 0.7);
        assert_eq!(m.order, vec![1, 3, 0, 2]);
        assert_eq!(m.max_coverage(), 1.0);
    }

    #[test]
    fn ring_views_look_at_center() {
        let g = FixedViewGrid::ring(Vec3::new(0.5, 0.0, 0.0), 0.6, 0.3, 4, 0.0).unwrap();
        assert_eq!(g.len(), 4);
        for p in &g.poses {
            let fwd = p.rotation.rotate(&Vec3::z());
            let to_c = (Vec3::new(0.5, 0.0, 0.0) - p.position).normalize();
            assert!((fwd - to_c).norm() < 1e-12);
            assert!((p.position.z - 0.3).abs() < 1e-15);
        }
        assert!(FixedViewGrid::ring(Vec3::zeros(), 0.6, 0.3, 0, 0.0).is_err());
        assert!(FixedViewGrid::authored(vec![]).is_err());
    }

    #[test]
    fn svg_outputs() {
        let m = CoverageMatrix::new(vec![vec![0.0, 1.0], vec![0.5, 0.25]], 0.7);
        let a = m.heatmap_svg(None);
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(!a.contains("generated"));
        assert!(m.heatmap_svg(Some("now")).contains("<!-- generated now -->"));
        assert!(a.contains(&ramp(0.0)) && a.contains(&ramp(1.0)));
        assert_eq!(ramp(0.0), "#006400");
        assert_eq!(ramp(1.0), "#ffff00");
        assert!(m.bars_svg(None).contains("view 0"));
    }

    #[test]
    fn std_err_examples() {
        assert_eq!(mean_std_err(&[0.5]), (0.5, 0.0));
        let (m, se) = mean_std_err(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn csv_round_trips(rows in prop::collection::vec(prop::collection::vec(0.0..=1.0f64, 5), 1..6), theta in 0.0..1.0f64) {
            let m = CoverageMatrix::new(rows, theta);
            prop_assert_eq!(CoverageMatrix::from_csv(&m.to_csv()).unwrap(), m);
        }

        #[test]
        fn coverage_monotone_in_threshold(row in prop::collection::vec(0.0..=1.0f64, 1..30), a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(coverage(&row, hi) <= coverage(&row, lo));
        }

        #[test]
        fn order_is_sorted(rows in prop::collection::vec(prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0]), 4), 1..8)) {
            let m = CoverageMatrix::new(rows, 0.7);
            for w in m.order.windows(2) {
                let (a, b) = (w[0], w[1]);
                prop_assert!(m.coverage[a] > m.coverage[b] || (m.coverage[a] == m.coverage[b] && a < b));
            }
        }
    }
}
