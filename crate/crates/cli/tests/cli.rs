use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_carleson"))
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("exp.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const COARSE: &str = r#"
[solver]
h = 0.03125
[scenario]
scales = [1.0, 0.5]
seeds = [11]
"#;

#[test]
fn geometry_report_embeds_hash_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let out = run(&["geometry", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("geometry.json")).unwrap()).unwrap();
    assert_eq!(v["command"], "geometry");
    assert_eq!(v["module_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("geometry.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with("config_hash,module_version"));
}

#[test]
fn steep_graph_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[domain]\nkind = \"graph\"\nl = 0.2\n");
    let out = run(&["geometry", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim().lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert!(v["message"].as_str().unwrap().contains("below 1/8"));
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn malformed_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["[solver]\nhh = 0.1\n", "[nonlinearity]\nkind = \"tabulated\"\ntable = \"missing.csv\"\n", "[scenario]\nscales = [2.0]\n"] {
        let cfg = write_config(dir.path(), body);
        let out = run(&["structure", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}");
    }
    assert_eq!(run(&["suite", "--criteria", "99", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sharpness_reports_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sharpness", "--format", "json", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(!dir.path().join("sharpness.csv").exists());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sharpness.json")).unwrap()).unwrap();
    let ex = v["report"]["examples"].as_array().unwrap();
    assert_eq!(ex.len(), 2);
    let gamma = ex[0]["gamma"].as_f64().unwrap();
    assert_eq!(gamma, (1.0f64 / 16.0 - 0.06).exp());
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), COARSE);
    let mut bodies = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        let out = run(&["carleson", "--config", cfg.to_str().unwrap(), "--threads", threads, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        bodies.push((std::fs::read(out_dir.join("carleson.json")).unwrap(), std::fs::read(out_dir.join("carleson.csv")).unwrap()));
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn solve_dumps_a_readable_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), COARSE);
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let f = std::fs::File::open(dir.path().join("solve_field.txt")).unwrap();
    let field = carleson_core::solver::GridField::read_text(std::io::BufReader::new(f)).unwrap();
    assert_eq!(field.h, 0.03125);
    assert!(dir.path().join("solve_field.csv").exists());
}

#[test]
fn pipelines_run_on_a_coarse_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), COARSE);
    for cmd in ["structure", "harnack", "holder", "blowup", "bharnack"] {
        let out = run(&[cmd, "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join(format!("{cmd}.json")).exists());
    }
}

#[test]
fn quick_suite_criteria_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["suite", "--criteria", "1,2,3,5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 4);
    assert!(dir.path().join("suite_timings.csv").exists());
}
