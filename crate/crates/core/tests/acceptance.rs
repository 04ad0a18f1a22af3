//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed.
//!
//! Reference values are computed here independently of the library: noise
//! schedules from their definition, exact soft values from the Gaussian
//! closed form, a Möller–Trumbore raycaster, a two-sample KS statistic and
//! importance-weighted Monte Carlo posterior means.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use viewplan_core::coverage::{compare_planners, compute_coverage, paired_wins, FixedViewGrid};
use viewplan_core::diffusion::{default_schedule, AnalyticPrior, Gaussian};
use viewplan_core::geom3d::{CameraIntrinsics, Pose, Vec3};
use viewplan_core::mesh::{segment_hits, segment_hits_bruteforce, Bvh, Segment, TriMesh};
use viewplan_core::reward::{
    composite_reward, r_close, r_marg, r_safe, r_vis, Occluders, PerturbationConfig, QueryPointSet, RewardConfig,
    RewardWeights,
};
use viewplan_core::sim::builtin::benchmark_scenario;
use viewplan_core::sim::run_episode;
use viewplan_core::svdd::{rew_max_diff, rew_max_diff_observed, PlannerMode, StandardizedPrior, SvddConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn alpha_bar(k: usize, steps: usize) -> f64 {
    (0..k)
        .map(|i| {
            let beta = if steps == 1 { 2e-2 } else { 1e-4 + (2e-2 - 1e-4) * i as f64 / (steps - 1) as f64 };
            1.0 - beta
        })
        .product()
}

fn std_normal_1d() -> StandardizedPrior {
    StandardizedPrior::unscaled(AnalyticPrior::Gaussian(Gaussian::isotropic(DVector::zeros(1), 1.0).unwrap()))
}

fn sampler(alpha: f64, m: usize, k: usize, mode: PlannerMode, seed: u64) -> SvddConfig {
    SvddConfig { alpha, m, k, mode, seed, parallel: false, ..SvddConfig::default() }
}

fn draw_1d(cfg: &SvddConfig, n: usize) -> Vec<f64> {
    let schedule = default_schedule(cfg.k).unwrap();
    let sp = std_normal_1d();
    let reward = |x: &DVector<f64>| x[0];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..n).map(|_| rew_max_diff(&sp, cfg, &schedule, &reward, &mut rng).unwrap().raw[0]).collect()
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

fn ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut all: Vec<f64> = a.iter().chain(&b).copied().collect();
    all.sort_by(f64::total_cmp);
    let cdf = |s: &[f64], x: f64| s.partition_point(|v| *v <= x) as f64 / s.len() as f64;
    all.iter().map(|&x| (cdf(&a, x) - cdf(&b, x)).abs()).fold(0.0, f64::max)
}

fn tilted_fidelity() -> Outcome {
    let start = Instant::now();
    let xs = draw_1d(&sampler(0.5, 64, 100, PlannerMode::Svdd, 1), 1000);
    let elapsed = start.elapsed();
    let (m, v) = mean_var(&xs);
    outcome(
        (m - 2.0).abs() <= 0.2 && (v - 1.0).abs() <= 0.3 && elapsed < Duration::from_secs(30),
        format!("mean {m:.4} (2 ± 0.2), var {v:.4} (1 ± 0.3), {elapsed:.2?}"),
    )
}

fn prior_recovery() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let direct: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
    let prior_only = draw_1d(&sampler(0.5, 64, 100, PlannerMode::PriorOnly, 2), 2000);
    let single = draw_1d(&sampler(0.5, 1, 100, PlannerMode::Svdd, 3), 2000);
    let elapsed = start.elapsed();
    let (d0, d1) = (ks(&prior_only, &direct), ks(&single, &direct));
    outcome(
        d0 < 0.05 && d1 < 0.05 && elapsed < Duration::from_secs(20),
        format!("KS prior_only {d0:.4}, KS M=1 {d1:.4} (< 0.05), {elapsed:.2?}"),
    )
}

fn alpha_monotonicity() -> Outcome {
    let means: Vec<f64> =
        [2.0, 0.5, 0.1].iter().map(|&a| mean_var(&draw_1d(&sampler(a, 64, 100, PlannerMode::Svdd, 4), 500)).0).collect();
    outcome(
        means[0] < means[1] && means[1] < means[2],
        format!("mean reward at alpha 2.0, 0.5, 0.1: {:.4}, {:.4}, {:.4}", means[0], means[1], means[2]),
    )
}

fn exact_weights() -> Outcome {
    let k = 50;
    let alpha = 0.5;
    let cfg = sampler(alpha, 16, k, PlannerMode::Svdd, 5);
    let schedule = default_schedule(k).unwrap();
    let sp = std_normal_1d();
    let reward = |x: &DVector<f64>| x[0];
    let mut worst = 0.0f64;
    let mut steps = 0;
    rew_max_diff_observed(&sp, &cfg, &schedule, &reward, &mut ChaCha8Rng::seed_from_u64(5), |set| {
        // For a N(0, 1) prior and r(x) = x, the exact soft value is
        // √ᾱ·x + (1 − ᾱ)/(2α); the shift is shared by all candidates.
        let ab = alpha_bar(set.k, k);
        let v: Vec<f64> = set.candidates.iter().map(|c| ab.sqrt() * c[0] + (1.0 - ab) / (2.0 * alpha)).collect();
        let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = v.iter().map(|x| ((x - top) / alpha).exp()).collect();
        let z: f64 = e.iter().sum();
        for (w, ei) in set.weights.iter().zip(&e) {
            worst = worst.max((w - ei / z).abs());
        }
        steps += 1;
    })
    .unwrap();
    outcome(worst <= 1e-10 && steps == k + 1, format!("max weight difference {worst:.3e} over {steps} resampling steps"))
}

/// Möller–Trumbore, two-sided, hit parameter restricted to [eps, 1 − eps].
fn mt_hit(a: &Vec3, b: &Vec3, tri: &[Vec3; 3], eps: f64) -> bool {
    let d = b - a;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = d.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = a - tri[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = d.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = e2.dot(&q) * inv;
    t >= eps && t <= 1.0 - eps
}

fn raycast_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pt = |r: &mut ChaCha8Rng| Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for i in 0..500u32 {
        let c = pt(&mut rng);
        for _ in 0..3 {
            vertices.push(c + pt(&mut rng) * 0.15);
        }
        triangles.push([3 * i, 3 * i + 1, 3 * i + 2]);
    }
    let mesh = TriMesh::new(vertices, triangles).unwrap();
    let tris: Vec<[Vec3; 3]> = (0..500).map(|i| mesh.triangle(i)).collect();
    let segments: Vec<Segment> = (0..1000).map(|_| Segment::new(pt(&mut rng) * 1.2, pt(&mut rng) * 1.2)).collect();
    let start = Instant::now();
    let bvh = Bvh::build(mesh.clone());
    let (mut mismatches, mut hits) = (0, 0);
    for s in &segments {
        let fast = segment_hits(&bvh, s, 1e-4);
        let oracle = tris.iter().any(|t| mt_hit(&s.a, &s.b, t, 1e-4));
        let brute = segment_hits_bruteforce(&mesh, s, 1e-4);
        mismatches += (fast != oracle || fast != brute) as usize;
        hits += fast as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(5),
        format!("{mismatches} mismatches over 1000 segments ({hits} hits), {elapsed:.2?}"),
    )
}

fn reward_closed_forms() -> Outcome {
    let e1 = (-1.0f64).exp();
    let pose = [Pose::identity()];
    let intr = CameraIntrinsics::new(100.0, 100.0, 50.0, 50.0, 100, 100).unwrap();
    let one = QueryPointSet::new(vec![vec![Vec3::new(0.0, 0.0, 1.0)]]).unwrap();
    let two = QueryPointSet::new(vec![vec![Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0)]]).unwrap();
    let errs = [
        (r_close(&pose, &one).unwrap() - e1).abs(),
        (r_close(&pose, &two).unwrap() - (1.0 + e1) / 2.0).abs(),
        (r_safe(&pose, &[Vec3::zeros()], 0.1).unwrap() + 1.0).abs(),
        (r_safe(&pose, &[Vec3::new(0.1, 0.0, 0.0)], 0.1).unwrap() + e1).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);

    let wall = [Bvh::build(viewplan_core::mesh::quad_mesh(&Pose::from_translation(Vec3::new(0.3, 0.0, 0.5)), 0.25, 0.25))];
    let occ = Occluders::new(&wall, &[]);
    let pts = QueryPointSet::new(vec![vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.3, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)]])
        .unwrap();
    let vis = r_vis(&pose, &intr, &pts, &occ, 1e-4).unwrap().value;
    let quiet = PerturbationConfig { j: 4, sigma_pos: 0.0, sigma_rot: 0.0, seed: 0 };
    let marg = r_marg(&pose, &intr, &pts, &occ, &quiet, 0.1, 1e-4).unwrap();
    let cfg = RewardConfig {
        weights: RewardWeights { lambda_c: 0.0, lambda_m: 0.0, lambda_s: 0.0, ..RewardWeights::default() },
        ..RewardConfig::default()
    };
    let total = composite_reward(&pose, &intr, &pts, &[Vec3::zeros()], &occ, &cfg).unwrap().total;
    outcome(
        worst <= 1e-12 && marg == vis && total == vis,
        format!("closed-form error {worst:.1e}; r_vis {vis}, zero-noise r_marg {marg}, zero-weight total {total}"),
    )
}

fn coverage_study() -> Outcome {
    let start = Instant::now();
    let sc = benchmark_scenario();
    let bundle = sc.build(None).unwrap();
    let cov = sc.coverage.as_ref().unwrap();
    let grid = FixedViewGrid::from_spec(&cov.views).unwrap();
    let matrix = compute_coverage(&bundle, &grid, 0.7).unwrap();
    let seeds: Vec<u64> = (0..20).collect();
    let modes = vec![
        ("prior_only".to_string(), bundle.config.with_mode(PlannerMode::PriorOnly)),
        ("svdd".to_string(), bundle.config.with_mode(PlannerMode::Svdd)),
    ];
    let report = compare_planners(&bundle, &modes, &seeds, None).unwrap();
    let elapsed = start.elapsed();
    let (prior, svdd) = (&report.modes[0], &report.modes[1]);
    let wins = paired_wins(svdd, prior);
    let max_c = matrix.max_coverage();
    outcome(
        grid.len() == 4 && max_c < 1.0 && svdd.mean_r_vis >= 0.9 && wins >= 16 && elapsed < Duration::from_secs(300),
        format!(
            "max C_v {max_c:.3} over {} views; mean r_vis svdd {:.4} vs prior_only {:.4}; svdd wins {wins}/20; {elapsed:.2?}",
            grid.len(),
            svdd.mean_r_vis,
            prior.mean_r_vis
        ),
    )
}

fn chunk_arithmetic() -> Outcome {
    let bundle = benchmark_scenario().build(None).unwrap();
    let cfg = &bundle.config;
    let a = run_episode(&bundle.world, &bundle.ee, &bundle.flow, cfg, 42).unwrap();
    let b = run_episode(&bundle.world, &bundle.ee, &bundle.flow, cfg, 42).unwrap();
    let (ja, jb) = (a.to_jsonl(), b.to_jsonl());
    let ok = bundle.world.episode_length == 24
        && cfg.planner.horizon == 24
        && cfg.planner.execute == 12
        && a.planning_calls == 2
        && a.steps.len() == 24
        && ja.lines().count() == 24
        && ja == jb;
    outcome(
        ok,
        format!(
            "{} planning calls, {} executed poses, logs identical: {}",
            a.planning_calls,
            a.steps.len(),
            ja.as_bytes() == jb.as_bytes()
        ),
    )
}

fn posterior_mean_mc() -> Outcome {
    let mean = Vector2::new(0.5, -1.0);
    let cov = Matrix2::new(1.0, 0.6, 0.6, 0.5);
    let prior = AnalyticPrior::Gaussian(
        Gaussian::new(DVector::from_column_slice(mean.as_slice()), DMatrix::from_column_slice(2, 2, cov.as_slice()))
            .unwrap(),
    );
    let steps = 100;
    let schedule = default_schedule(steps).unwrap();
    let chol = cov.cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws: Vec<Vector2<f64>> =
        (0..100_000).map(|_| mean + chol * Vector2::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let probes = [(20, Vector2::new(1.0, -0.5)), (50, Vector2::new(0.3, -1.2)), (100, Vector2::new(-0.4, 0.2))];
    let mut worst = 0.0f64;
    for (k, x) in probes {
        let ab = alpha_bar(k, steps);
        let logw: Vec<f64> = draws.iter().map(|x0| -(x - ab.sqrt() * x0).norm_squared() / (2.0 * (1.0 - ab))).collect();
        let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = w.iter().sum();
        let mc = draws.iter().zip(&w).fold(Vector2::zeros(), |acc, (x0, wi)| acc + x0 * *wi) / z;
        let got = prior.posterior_mean_x0(&DVector::from_column_slice(x.as_slice()), k, &schedule).unwrap();
        let analytic = Vector2::new(got[0], got[1]);
        worst = worst.max((analytic - mc).norm() / analytic.norm());
    }
    outcome(worst < 1e-2, format!("max relative error {worst:.2e} over 3 probes"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("tilted-distribution fidelity", tilted_fidelity),
        ("prior recovery", prior_recovery),
        ("alpha monotonicity", alpha_monotonicity),
        ("exact-weight equivalence", exact_weights),
        ("raycast oracle equivalence", raycast_oracle),
        ("reward-term closed forms", reward_closed_forms),
        ("coverage study", coverage_study),
        ("chunked-loop arithmetic", chunk_arithmetic),
        ("posterior-mean correctness", posterior_mean_mc),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.pass as usize;
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
