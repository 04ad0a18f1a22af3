//! `viewplan`: run planning episodes, coverage studies, sampler checks and
//! benchmarks from a JSON scenario.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use config::{ConfigError, RawConfig};
use viewplan_core::coverage::{compare_planners, compute_coverage, mean_std_err, paired_wins, FixedViewGrid};
use viewplan_core::geom3d::Vec3;
use viewplan_core::mesh::{segment_hits, segment_hits_bruteforce, Bvh, Segment, TriMesh};
use viewplan_core::sim::builtin::benchmark_scenario;
use viewplan_core::sim::{run_episode, Bundle, EpisodeLog, Scenario};
use viewplan_core::svdd::verify::{run_battery, BatteryConfig, CheckStatus};
use viewplan_core::svdd::PlannerMode;

#[derive(Parser)]
#[command(name = "viewplan", version, about = "Visibility-aware camera viewpoint planning")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config; the built-in default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config leaf, e.g. `--set planner.sampler.m=32`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Omit timestamps from SVG output.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run planning episodes and write per-seed JSONL logs and a summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Number of seeds, starting at the base seed.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<PlannerMode>,
    },
    /// Fixed-view coverage matrix, optionally with a planner comparison.
    Coverage {
        #[command(flatten)]
        common: Common,
        /// Also compare svdd against prior_only over the config's seeds.
        #[arg(long)]
        compare: bool,
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Analytic-prior checks of the sampler.
    VerifySvdd {
        #[command(flatten)]
        common: Common,
        /// Temperatures for the monotonicity check.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Negate the resampling weights. Negative control: the battery
        /// should fail.
        #[arg(long)]
        corrupt_weights: bool,
    },
    /// Raycast throughput and per-chunk planning time.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        segments: usize,
        #[arg(long, default_value_t = 500)]
        triangles: usize,
        /// Candidate counts to time.
        #[arg(long = "m", value_delimiter = ',', default_value = "1,16")]
        ms: Vec<usize>,
        /// Episodes per candidate count.
        #[arg(long, default_value_t = 1)]
        episodes: usize,
    },
}

fn parse_mode(s: &str) -> Result<PlannerMode, String> {
    match s {
        "svdd" => Ok(PlannerMode::Svdd),
        "prior_only" => Ok(PlannerMode::PriorOnly),
        _ => Err(format!("unknown mode `{s}` (expected svdd or prior_only)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Run { common, seeds, mode } => cmd_run(&common, seeds, mode),
        Command::Coverage { common, compare, seeds } => cmd_coverage(&common, compare, seeds),
        Command::VerifySvdd { common, alphas, corrupt_weights } => cmd_verify(&common, alphas, corrupt_weights),
        Command::Bench { common, segments, triangles, ms, episodes } => {
            cmd_bench(&common, segments, triangles, &ms, episodes)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load_scenario(common: &Common) -> Result<(Scenario, Bundle), ConfigError> {
    let mut raw = RawConfig::load(common.config.as_deref(), benchmark_scenario)?;
    raw.apply_all(&common.overrides)?;
    let mut scenario: Scenario = raw.parse()?;
    if let Some(s) = common.seed {
        scenario.seeds.base = s;
    }
    let bundle = scenario.build(raw.base_dir.as_deref()).map_err(|e| ConfigError(e.to_string()))?;
    Ok((scenario, bundle))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn out_dir(common: &Common) -> Result<&Path> {
    std::fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
    Ok(&common.out)
}

fn timestamp(common: &Common) -> Option<String> {
    if common.deterministic {
        return None;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| format!("unix {}", d.as_secs()))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn episode_summary(log: &EpisodeLog) -> serde_json::Value {
    json!({
        "seed": log.seed,
        "steps": log.steps.len(),
        "planning_calls": log.planning_calls,
        "mean_r_vis": log.mean_r_vis(),
        "mean_total": log.steps.iter().map(|s| s.total).sum::<f64>() / log.steps.len().max(1) as f64,
        "slew_violations": log.slew_violations(),
        "fallback_steps": log.chunks.iter().map(|c| c.fallback_steps).sum::<usize>(),
        "error": log.error,
    })
}

fn cmd_run(common: &Common, seeds: Option<usize>, mode: Option<PlannerMode>) -> Result<ExitCode> {
    let (mut scenario, bundle) = load_scenario(common)?;
    if let Some(n) = seeds {
        scenario.seeds.count = n;
    }
    let mut cfg = bundle.config.clone();
    if let Some(m) = mode {
        cfg = cfg.with_mode(m);
        scenario.planner.sampler.mode = m;
    }
    let dir = out_dir(common)?;
    write(dir, "config.json", &pretty(&scenario))?;
    let seed_list = scenario.seeds.seeds();
    let mut logs = Vec::with_capacity(seed_list.len());
    for &seed in &seed_list {
        let start = Instant::now();
        let log = run_episode(&bundle.world, &bundle.ee, &bundle.flow, &cfg, seed)?;
        log::info!("seed {seed}: mean r_vis {:.4} in {:.2?}", log.mean_r_vis(), start.elapsed());
        write(dir, &format!("episode_{seed}.jsonl"), &log.to_jsonl())?;
        logs.push(log);
    }
    let per_seed: Vec<f64> = logs.iter().map(|l| l.mean_r_vis()).collect();
    let (mean, std_err) = mean_std_err(&per_seed);
    let failed = logs.iter().filter(|l| l.error.is_some()).count();
    let summary = json!({
        "mode": cfg.mode(),
        "seeds": logs.iter().map(episode_summary).collect::<Vec<_>>(),
        "mean_r_vis": mean,
        "std_err": std_err,
        "failed_episodes": failed,
    });
    write(dir, "summary.json", &pretty(&summary))?;
    println!("{} episodes, mode {}, mean r_vis {mean:.4} ± {std_err:.4}", logs.len(), cfg.mode().as_str());
    if failed > 0 {
        eprintln!("{failed} episode(s) ended with a planning error; see summary.json");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_coverage(common: &Common, compare: bool, seeds: Option<usize>) -> Result<ExitCode> {
    let (mut scenario, bundle) = load_scenario(common)?;
    if let Some(n) = seeds {
        scenario.seeds.count = n;
    }
    let spec = scenario.coverage.clone().ok_or_else(|| ConfigError("no `coverage` section in the config".into()))?;
    let grid = FixedViewGrid::from_spec(&spec.views).map_err(|e| ConfigError(e.to_string()))?;
    let matrix = compute_coverage(&bundle, &grid, spec.threshold)?;
    let dir = out_dir(common)?;
    let ts = timestamp(common);
    write(dir, "coverage.csv", &matrix.to_csv())?;
    write(dir, "coverage_heatmap.svg", &matrix.heatmap_svg(ts.as_deref()))?;
    write(dir, "coverage_bars.svg", &matrix.bars_svg(ts.as_deref()))?;
    for &v in &matrix.order {
        println!("view {v}: C_v = {:.3}", matrix.coverage[v]);
    }
    if compare {
        let modes = vec![
            ("prior_only".to_string(), bundle.config.with_mode(PlannerMode::PriorOnly)),
            ("svdd".to_string(), bundle.config.with_mode(PlannerMode::Svdd)),
        ];
        let report = compare_planners(&bundle, &modes, &scenario.seeds.seeds(), None)?;
        let wins = paired_wins(&report.modes[1], &report.modes[0]);
        write(dir, "comparison.csv", &report.to_csv())?;
        write(dir, "comparison.svg", &report.bars_svg(ts.as_deref()))?;
        write(dir, "comparison.json", &pretty(&json!({"modes": report.modes, "svdd_wins": wins})))?;
        for m in &report.modes {
            println!("{}: mean r_vis {:.4} ± {:.4}", m.label, m.mean_r_vis, m.std_err);
        }
        println!("svdd wins {wins}/{}", report.modes[0].seeds.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(common: &Common, alphas: Option<Vec<f64>>, corrupt: bool) -> Result<ExitCode> {
    let mut raw = RawConfig::load(common.config.as_deref(), BatteryConfig::default)?;
    raw.apply_all(&common.overrides)?;
    let mut bc: BatteryConfig = raw.parse()?;
    if let Some(s) = common.seed {
        bc.seed = s;
    }
    if let Some(a) = alphas {
        bc.alphas = a;
    }
    bc.corrupt_weights |= corrupt;
    let report = run_battery(&bc).map_err(|e| ConfigError(e.to_string()))?;
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    let dir = out_dir(common)?;
    write(dir, "verify_svdd.json", &pretty(&json!({"config": bc, "passed": report.passed(), "checks": report.checks})))?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct RaycastBench {
    triangles: usize,
    segments: usize,
    hits: usize,
    bvh_seconds: f64,
    brute_force_seconds: f64,
    bvh_segments_per_second: f64,
    brute_force_segments_per_second: f64,
    speedup: f64,
    results_agree: bool,
}

#[derive(Serialize)]
struct PlannerBench {
    m: usize,
    k: usize,
    stride: usize,
    horizon: usize,
    planning_calls: usize,
    seconds_per_chunk: f64,
}

fn random_mesh(rng: &mut ChaCha8Rng, triangles: usize) -> Result<TriMesh> {
    let mut point = |r: f64| Vec3::from_fn(|_, _| rng.random_range(-r..r));
    let mut vertices = Vec::with_capacity(3 * triangles);
    for _ in 0..triangles {
        let c = point(1.0);
        for _ in 0..3 {
            vertices.push(c + point(0.15));
        }
    }
    let faces = (0..triangles as u32).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
    Ok(TriMesh::new(vertices, faces)?)
}

fn bench_raycast(seed: u64, triangles: usize, segments: usize) -> Result<RaycastBench> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = random_mesh(&mut rng, triangles)?;
    let mut end = || Vec3::from_fn(|_, _| rng.random_range(-1.2..1.2));
    let segs: Vec<Segment> = (0..segments).map(|_| Segment::new(end(), end())).collect();
    let bvh = Bvh::build(mesh.clone());
    let start = Instant::now();
    let fast: Vec<bool> = segs.iter().map(|s| segment_hits(&bvh, s, 1e-4)).collect();
    let bvh_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let brute: Vec<bool> = segs.iter().map(|s| segment_hits_bruteforce(&mesh, s, 1e-4)).collect();
    let brute_force_seconds = start.elapsed().as_secs_f64();
    Ok(RaycastBench {
        triangles,
        segments,
        hits: fast.iter().filter(|h| **h).count(),
        bvh_seconds,
        brute_force_seconds,
        bvh_segments_per_second: segments as f64 / bvh_seconds,
        brute_force_segments_per_second: segments as f64 / brute_force_seconds,
        speedup: brute_force_seconds / bvh_seconds,
        results_agree: fast == brute,
    })
}

fn cmd_bench(common: &Common, segments: usize, triangles: usize, ms: &[usize], episodes: usize) -> Result<ExitCode> {
    if triangles == 0 || segments == 0 || episodes == 0 || ms.is_empty() {
        return Err(ConfigError("segments, triangles, episodes and --m must be non-empty".into()).into());
    }
    let (scenario, bundle) = load_scenario(common)?;
    let raycast = bench_raycast(scenario.seeds.base, triangles, segments)?;
    println!(
        "raycast: BVH {:.3e} seg/s, brute force {:.3e} seg/s, speedup {:.1}",
        raycast.bvh_segments_per_second, raycast.brute_force_segments_per_second, raycast.speedup
    );
    let mut planner = Vec::new();
    for &m in ms {
        let mut cfg = bundle.config.with_mode(PlannerMode::Svdd);
        cfg.planner.sampler.m = m;
        cfg.validate().map_err(|e| ConfigError(e.to_string()))?;
        let mut calls = 0;
        let start = Instant::now();
        for i in 0..episodes as u64 {
            calls += run_episode(&bundle.world, &bundle.ee, &bundle.flow, &cfg, scenario.seeds.base + i)?.planning_calls;
        }
        // Execution-step scoring is included; it is a small fraction of a
        // planning call.
        let seconds_per_chunk = start.elapsed().as_secs_f64() / calls.max(1) as f64;
        println!("M = {m}: {seconds_per_chunk:.3} s per chunk over {calls} calls");
        let s = &cfg.planner;
        planner.push(PlannerBench {
            m,
            k: s.sampler.k,
            stride: s.sampler.stride,
            horizon: s.horizon,
            planning_calls: calls,
            seconds_per_chunk,
        });
    }
    let dir = out_dir(common)?;
    write(dir, "bench.json", &pretty(&json!({"raycast": raycast, "planner": planner})))?;
    Ok(ExitCode::SUCCESS)
}
