use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn load(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(configs().join(name)).unwrap()).unwrap()
}

fn pdmp(cmd: &str, config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdmp"))
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn run_value(cmd: &str, config: &Value) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    let out = pdmp(cmd, &path, &dir.path().join("out"));
    (out, dir)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn dt_max_line(o: &Output) -> f64 {
    let text = stdout(o);
    let line = text.lines().find(|l| l.starts_with("dt_max = ")).unwrap();
    let inner = line.split('(').nth(1).unwrap().trim_end_matches(')');
    inner.parse().unwrap()
}

#[test]
fn cfl_reproduces_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("cfl", &configs().join("sec4_cfl.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("dt_max = 0.250063 "), "{}", stdout(&o));
}

#[test]
fn cfl_with_halved_spacing() {
    let mut c = load("sec4_cfl.json");
    c["grid"]["dx"] = json!(2.002);
    let (o, _d) = run_value("cfl", &c);
    assert_eq!(o.status.code(), Some(0));
    assert!((dt_max_line(&o) - 0.200080).abs() < 1e-6, "{}", stdout(&o));
}

#[test]
fn cfl_unbounded_without_drift_or_jumps() {
    let c = json!({
        "model": {"states": [{"drift": "0", "mu": 0}], "q": [[1]]},
        "grid": {"domain": [0, 1], "k": 11},
        "time": {"T": 1},
        "initial": [{"steps": [{"w": 1, "x0": 0.5}]}]
    });
    let (o, _d) = run_value("cfl", &c);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("dt_max = unbounded"));
}

#[test]
fn unstable_run_fails_monotone_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("solve", &configs().join("sec4_unstable.json"), dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stdout(&o).contains("CHECK monotone FAIL"));
}

#[test]
fn cfl_violation_is_refused_without_override() {
    let mut c = load("sec4_unstable.json");
    c["time"]["allow_cfl_violation"] = json!(false);
    let (o, _d) = run_value("solve", &c);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn blow_up_is_a_numeric_failure() {
    let mut c = load("sec4_unstable.json");
    c["time"]["dt"] = json!(5.0);
    c["time"]["T"] = json!(5000.0);
    let (o, _d) = run_value("solve", &c);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
}

#[test]
fn stable_run_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("solve", &configs().join("sec4_stable.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for t in ["136.375", "272.75", "409.125", "545.5"] {
        let text = fs::read_to_string(dir.path().join(format!("sec4_stable_t{t}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,F_1,F_2,F_3,F_4,p_1,p_2,p_3,p_4,F_total,p_total"));
        assert_eq!(lines.count(), 1000);
    }
}

#[test]
fn zero_horizon_reproduces_initial_data() {
    let mut c = load("sec4_stable.json");
    c["time"]["T"] = json!(0.0);
    c["snapshots"] = json!([]);
    let (o, d) = run_value("solve", &c);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let files: Vec<_> = fs::read_dir(d.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(
        files.iter().filter(|f| f.to_string_lossy().ends_with(".csv")).count(),
        1
    );
    let text = fs::read_to_string(d.path().join("out/sec4_stable_t0.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let expected = if v[0] >= 0.0 { 0.25 } else { 0.0 };
        assert!(v[1..5].iter().all(|&f| f == expected), "{line}");
    }
}

#[test]
fn schema_error_names_pointer() {
    let mut c = load("sec4_cfl.json");
    c["model"]["states"][2]["mu"] = json!("four");
    let (o, _d) = run_value("cfl", &c);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/model/states/2/mu"), "{}", stderr(&o));
}

#[test]
fn row_stochastic_q_is_rejected() {
    let mut c = load("sec4_cfl.json");
    c["model"]["q"] = json!([
        [0.1, 0.2, 0.3, 0.4],
        [0.1, 0.2, 0.3, 0.4],
        [0.1, 0.2, 0.3, 0.4],
        [0.1, 0.2, 0.3, 0.4]
    ]);
    let (o, _d) = run_value("cfl", &c);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("cfl", &dir.path().join("nope.json"), dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn resolved_config_reloads_identically() {
    let mut c = load("sec4_stable.json");
    c["grid"].as_object_mut().unwrap().remove("domain");
    c["time"].as_object_mut().unwrap().remove("dt");
    c["time"]["T"] = json!(1.0);
    c["snapshots"] = json!([]);
    let (o, d) = run_value("solve", &c);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read_to_string(d.path().join("out/sec4_stable_config.json")).unwrap();
    let resolved: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(resolved["grid"]["domain"], json!([-2000.0, 2000.0]));
    let (o, d2) = run_value("solve", &resolved);
    assert_eq!(o.status.code(), Some(0));
    let second = fs::read_to_string(d2.path().join("out/sec4_stable_config.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn simulate_writes_sorted_ensemble() {
    let mut c = load("telegraph_compare.json");
    c["mc"]["n"] = json!(2000);
    let (o, d) = run_value("simulate", &c);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("out/telegraph_compare_ensemble.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# seed=7 N=2000 T=20 generator=chacha8-stream"));
    assert_eq!(lines.next(), Some("endpoint,end_state"));
    let xs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(xs.len(), 2000);
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn simulate_needs_mc_section() {
    let (o, _d) = run_value("simulate", &load("sec4_stable.json"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/mc"));
}

#[test]
fn telegraph_compare_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("compare", &configs().join("telegraph_compare.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let ks = fs::read_to_string(dir.path().join("telegraph_compare_ks.csv")).unwrap();
    assert_eq!(ks.lines().count(), 2);
}

#[test]
fn convergence_reports_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdmp("convergence", &configs().join("telegraph_convergence.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("order = "))
        .unwrap()
        .to_string();
    let order: f64 = line[8..].split_whitespace().next().unwrap().parse().unwrap();
    assert!((0.7..=1.3).contains(&order), "{line}");
}

#[test]
fn bundled_configs_resolve() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let dir = tempfile::tempdir().unwrap();
        let o = pdmp("cfl", &path, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stderr(&o));
    }
}
