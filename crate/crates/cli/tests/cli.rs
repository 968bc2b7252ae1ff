use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{cmd}-config.json"));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ajm"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn ok(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> (Vec<Vec<String>>, Value) {
    let o = run(cmd, config, dir, extra);
    assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    let out = dir.join("out");
    let text = fs::read_to_string(out.join(format!("{cmd}.csv"))).unwrap();
    let rows = text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect();
    let json = serde_json::from_str(&fs::read_to_string(out.join(format!("{cmd}.json"))).unwrap()).unwrap();
    (rows, json)
}

fn col(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[i].parse().unwrap()).collect()
}

fn outputs(dir: &Path, cmd: &str) -> (Vec<u8>, Vec<u8>) {
    let out: PathBuf = dir.join("out");
    (fs::read(out.join(format!("{cmd}.csv"))).unwrap(), fs::read(out.join(format!("{cmd}.json"))).unwrap())
}

#[test]
fn symmetric_sweep_touches_the_reported_maximum() {
    let dir = TempDir::new().unwrap();
    let (rows, json) = ok("sweep-aprime", r#"{"sigma_a": {"start": 0.05, "stop": 1.5, "step": 0.05}}"#, dir.path(), &[]);
    assert_eq!(rows[0], ["sigma_a", "sigma_b", "a_prime", "b_prime", "lhs_uncertainty"]);
    assert_eq!(rows.len(), 31);
    let s = col(&rows, "sigma_a");
    let a = col(&rows, "a_prime");
    let k = s.iter().position(|&x| (x - 0.7).abs() < 1e-12).unwrap();
    assert!((a[k] - 0.628).abs() <= 0.003, "{}", a[k]);
    assert!(col(&rows, "lhs_uncertainty").iter().all(|&v| v <= 1.0));
    assert_eq!(json["command"], "sweep-aprime");
    assert_eq!(json["results"]["bound_holds"], true);
    assert!(json["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    assert!(json["tolerances"]["probability_sum"] == 1e-9);
    assert_eq!(json["config"]["grid_points"], 512);
}

#[test]
fn narrow_first_detector_gives_increasing_b_prime() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"sigma_a": 0.1, "sigma_b": {"start": 0.1, "stop": 3.0, "step": 0.2}}"#;
    let (rows, _) = ok("sweep-aprime", cfg, dir.path(), &[]);
    let b = col(&rows, "b_prime");
    assert_eq!(b.len(), 15);
    assert!(b.windows(2).all(|w| w[1] > w[0]), "{b:?}");
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("sweep-aprime", r#"{"sigma_a": {"start": 1.0, "stop": 0.5, "step": 0.1}}"#),
        ("sweep-aprime", r#"{"sigma_a": 0.7, "colour": 1}"#),
        ("sweep-aprime", r#"{"sigma_a": 50.0}"#),
        ("sweep-aprime", "not json"),
        ("post-state", r#"{"sigmas": [0.7, 0.7], "state": [1.0, 1.0, 0.0]}"#),
        ("post-state", r#"{"sigmas": [0.7, 0.7], "state": [0.0, 0.0, 1.0], "outcomes": ["+0"]}"#),
        ("oblique", r#"{"a_prime": 0.5, "sigma": 0.7, "state": [0, 0, 0], "theta": 1.0}"#),
        ("oblique", r#"{"a_prime": 0.5, "state": [0, 0, 0], "theta": 4.0}"#),
        ("three-sweep", r#"{"sigmas": 0.7, "mc_samples": 4096}"#),
        ("ft-check", r#"{}"#),
        ("jm-check", r#"{}"#),
    ];
    for (cmd, cfg) in cases {
        let o = run(cmd, cfg, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(2), "{cmd} {cfg}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_ajm")).args(["fidelities", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = run("jm-check", r#"{"unbiased_pairs": [{"a": [1,0,0], "b": [0,1,0]}]}"#, dir.path(), &["--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let (d1, d2, d3) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = r#"{"sigma_a": [0.3, 0.7], "sigma_b": [0.5, 1.1]}"#;
    ok("sweep-aprime", cfg, d1.path(), &[]);
    ok("sweep-aprime", cfg, d2.path(), &["--threads", "1"]);
    assert_eq!(outputs(d1.path(), "sweep-aprime"), outputs(d2.path(), "sweep-aprime"));

    let cfg = r#"{"triples": [[0.7, 0.7, 0.7], [0.5, 0.7, 0.9]], "mc_samples": 65536, "seed": 3}"#;
    ok("three-sweep", cfg, d1.path(), &[]);
    ok("three-sweep", cfg, d2.path(), &["--threads", "2"]);
    assert_eq!(outputs(d1.path(), "three-sweep"), outputs(d2.path(), "three-sweep"));
    ok("three-sweep", cfg, d3.path(), &["--seed", "4"]);
    assert_ne!(outputs(d1.path(), "three-sweep").0, outputs(d3.path(), "three-sweep").0);
}

#[test]
fn three_sweep_rows_respect_the_bounds() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"sigmas": [0.55, 1.0], "mc_samples": 262144}"#;
    let (rows, json) = ok("three-sweep", cfg, dir.path(), &["--seed", "11"]);
    assert_eq!(json["config"]["seed"], 11);
    for (a, r) in col(&rows, "a_prime").iter().zip(col(&rows, "radial_a_prime")) {
        assert!((a - r).abs() <= 0.01, "{a} vs {r}");
        assert!(r <= 1.0 / 3f64.sqrt());
    }
    assert!(col(&rows, "sum_squares").iter().all(|&s| s <= 1.0));
    let holds: Vec<&str> = rows[1..].iter().map(|r| r[r.len() - 1].as_str()).collect();
    assert_eq!(holds, ["true", "true"]);
    let eff = json["results"][0]["effects"].as_array().unwrap();
    assert_eq!(eff.len(), 8);
}

#[test]
fn post_state_bands() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (rows, json) = ok("post-state", &format!(r#"{{"sigmas": [0.7, 0.7], "state": [{h}, {h}, 0]}}"#), dir.path(), &[]);
    assert_eq!(rows.len(), 5);
    let p: f64 = col(&rows, "probability").iter().sum();
    assert!((p - 1.0).abs() <= 1e-9);
    let up = col(&rows, "uncertainty_product")[0];
    let mag = col(&rows, "magnitude")[0];
    assert!((0.85..=1.0).contains(&up), "{up}");
    assert!((0.4..=0.6).contains(&mag), "{mag}");
    let q = col(&rows, "probability_quadrature");
    for (a, b) in col(&rows, "probability").iter().zip(q) {
        assert!((a - b).abs() <= 1e-6);
    }
    assert_eq!(json["results"]["outcomes"][0]["outcome"], "++");

    let cfg = format!(r#"{{"sigmas": [0.1, 3.0], "state": [{h}, {h}, 0], "outcomes": ["++"]}}"#);
    let (rows, _) = ok("post-state", &cfg, dir.path(), &[]);
    assert_eq!(rows.len(), 2);
    assert!(col(&rows, "angle_to_x_deg")[0] >= 80.0);
}

#[test]
fn fidelities_at_equal_widths() {
    let dir = TempDir::new().unwrap();
    let (rows, json) = ok("fidelities", r#"{"pairs": [[0.7, 0.7], [0.4, 1.1]]}"#, dir.path(), &[]);
    assert_eq!(rows.len(), 3);
    let d = col(&rows, "eta_d");
    assert!((d[0] - 0.75).abs() <= 1e-6);
    assert!(col(&rows, "eta_i_difference")[0].abs() <= 1e-3);
    let r = &json["results"][0];
    assert!((r["eta_f"].as_f64().unwrap() - r["eta_i"].as_f64().unwrap()).abs() <= 1e-3);
    // η_f needs equal widths.
    assert_eq!(rows[2][6], "");
    assert!(json["results"][1]["eta_f"].is_null());
}

#[test]
fn oblique_reduces_to_orthogonal_reading() {
    let dir = TempDir::new().unwrap();
    let cfg = format!(r#"{{"sigma": 0.7, "state": [0.6, 0.3, 0.2], "theta": [0.0, 0.5, {}, 3.0]}}"#, std::f64::consts::FRAC_PI_2);
    let (rows, json) = ok("oblique", &cfg, dir.path(), &[]);
    assert_eq!(rows.len(), 5);
    assert!(json["results"]["max_deviation_at_right_angle"].as_f64().unwrap() <= 1e-9);
    for s in col(&rows, "sum") {
        assert!((s - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn ft_check_angles_give_common_bound() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"angles": {"theta": 0.414, "phi1": 0.159, "phi": 0.477, "unit": "pi"}}"#;
    let (rows, json) = ok("ft-check", cfg, dir.path(), &[]);
    let a = col(&rows, "max_common_aprime")[0];
    assert!((a - 0.667).abs() <= 0.002, "{a}");
    assert_eq!(json["results"]["report"]["condition"]["ft"]["vertex_index"], 1);

    let s = 1.0 / 3f64.sqrt();
    let cfg = format!(r#"{{"vectors": {{"l": [{s}, 0, 0], "m": [0, {s}, 0], "n": [0, 0, {s}]}}}}"#);
    let (rows, json) = ok("ft-check", &cfg, dir.path(), &[]);
    assert!((col(&rows, "min_total")[0] - 4.0).abs() <= 1e-9);
    assert!((json["results"]["report"]["sum_squares"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn jm_check_verdicts() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{
        "joint2": [
            {"obs1": {"x": 0, "m": [1, 0, 0]}, "obs2": {"x": 0, "m": [0, 1, 0]}, "Z": 0, "z": [0, 0, 0]},
            {"obs1": {"x": 0, "m": [0.7, 0, 0]}, "obs2": {"x": 0, "m": [0, 0.7, 0]}, "Z": 0, "z": [0, 0, 0]}
        ],
        "joint3": [
            {"obs": [{"x": 0, "m": [0.5, 0, 0]}, {"x": 0, "m": [0, 0.5, 0]}, {"x": 0, "m": [0, 0, 0.5]}],
             "Z": [0, 0, 0, 0], "z": [[0, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]]}
        ],
        "unbiased_pairs": [{"a": [1, 0, 0], "b": [0, 1, 0]}, {"a": [0.7, 0, 0], "b": [0, 0.7, 0]}]
    }"#;
    let (rows, json) = ok("jm-check", cfg, dir.path(), &[]);
    let valid: Vec<&str> = rows[1..].iter().map(|r| r[2].as_str()).collect();
    assert_eq!(valid, ["false", "true", "true", "false", "true"]);
    assert_eq!(json["results"]["joint3"][0]["necessary"]["all"], true);
}
