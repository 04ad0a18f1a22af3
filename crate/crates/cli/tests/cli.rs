use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn viewplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viewplan")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    viewplan(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn static_config() -> String {
    configs().join("static.json").to_str().unwrap().to_string()
}

#[test]
fn run_one_seed_writes_one_log() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--config", &static_config(), "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let logs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".jsonl"))
        .collect();
    assert_eq!(logs.len(), 1);
    let text = std::fs::read_to_string(dir.path().join("episode_5.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 12);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"][0]["seed"], 5);
    assert_eq!(summary["seeds"][0]["mean_r_vis"], 1.0);
}

#[test]
fn many_seeds_record_distinct_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--config", &static_config(), "--seeds", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let seeds: Vec<u64> = summary["seeds"].as_array().unwrap().iter().map(|s| s["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (0..20).collect::<Vec<_>>());
    for s in seeds {
        assert!(dir.path().join(format!("episode_{s}.jsonl")).exists());
    }
}

#[test]
fn schema_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["run", "--config", &static_config(), "--set", "planner.sampler.alpha=\"hot\""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("planner.sampler.alpha"), "{}", stderr(&o));

    let o = run_in(dir.path(), &["run", "--set", "reward.weights.lambda_x=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lambda_x"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scene": {}}"#).unwrap();
    let o = run_in(dir.path(), &["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("scene"));

    let o = run_in(dir.path(), &["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));

    // Valid types but an inconsistent planner.
    let o = run_in(dir.path(), &["run", "--config", &static_config(), "--set", "planner.execute=0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "--seed", "3", "--seeds", "1", "--set", "planner.sampler.m=4"];
    for d in [&a, &b] {
        let o = run_in(d.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["episode_3.jsonl", "summary.json", "config.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn coverage_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run_in(d.path(), &["coverage", "--deterministic"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["coverage.csv", "coverage_heatmap.svg", "coverage_bars.svg"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.path().join("coverage.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(!std::fs::read_to_string(a.path().join("coverage_bars.svg")).unwrap().contains("unix"));
}

#[test]
fn coverage_needs_a_view_section() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["coverage", "--config", &static_config()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coverage_comparison_writes_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["coverage", "--compare", "--seeds", "2", "--set", "planner.sampler.m=4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("comparison.json")).unwrap()).unwrap();
    assert_eq!(report["modes"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("comparison.svg").exists());
}

const SMALL_BATTERY: [&str; 6] = ["--set", "n_tilted=400", "--set", "n_ks=1500", "--set", "n_monotone=200"];

#[test]
fn verify_battery_passes() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify-svdd"];
    args.extend(SMALL_BATTERY);
    let o = run_in(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn verify_single_alpha_skips_monotonicity() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify-svdd", "--alphas", "0.5"];
    args.extend(SMALL_BATTERY);
    let o = run_in(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("SKIP alpha_monotonicity"));
}

#[test]
fn verify_corrupted_weights_fail() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify-svdd", "--corrupt-weights"];
    args.extend(SMALL_BATTERY);
    let o = run_in(dir.path(), &args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL tilted_mean_1d"));
}

#[test]
fn bench_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["bench", "--segments", "20000", "--m", "1,16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bench.json")).unwrap()).unwrap();
    let r = &v["raycast"];
    assert_eq!(r["triangles"], 500);
    assert_eq!(r["segments"], 20000);
    assert_eq!(r["results_agree"], true);
    assert!(r["speedup"].as_f64().unwrap() > 1.0);
    for key in ["bvh_seconds", "brute_force_seconds", "bvh_segments_per_second", "brute_force_segments_per_second"] {
        assert!(r[key].as_f64().unwrap() > 0.0, "{key}");
    }
    let p = v["planner"].as_array().unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!((p[0]["m"].as_u64(), p[1]["m"].as_u64()), (Some(1), Some(16)));
    assert!(p[0]["seconds_per_chunk"].as_f64().unwrap() < p[1]["seconds_per_chunk"].as_f64().unwrap());
    assert_eq!(p[0]["planning_calls"], 2);
}
