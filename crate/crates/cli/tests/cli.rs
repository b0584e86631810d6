use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qwshrink(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwshrink")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fig5_run_writes_expected_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"figure":"fig5_hard","seed":1}"#);
    let o = qwshrink(&["run", &cfg, "--output-dir", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("out/fig5_hard.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "index,value,original,multiplier,ideal,shrunk,standard_error");
    let shrunk: Vec<f64> = lines.map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    let want = [0.0, 0.0, 0.9, 0.0, 0.0, -1.0, 0.0, 0.0];
    for (a, b) in shrunk.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 1);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_json_exits_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\"figure\": \"fig5_hard\",\n \"seed\": }");
    let o = qwshrink(&["run", &cfg, "--output-dir", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn schema_errors_exit_2_naming_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write(tmp.path(), "u.json", r#"{"figure":"fig5_hard","seed":1,"sead":2}"#);
    let o = qwshrink(&["run", &unknown], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sead"));
    let missing = write(tmp.path(), "m.json", r#"{"figure":"fig5_hard"}"#);
    let o = qwshrink(&["run", &missing], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
    let o = qwshrink(&["run", "does-not-exist.json"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"figure":"fig3_doppler","seed":5,"shots":1024}"#);
    for dir in ["a", "b"] {
        let o = qwshrink(&["run", &cfg, "--output-dir", dir], tmp.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["clean.csv", "noisy.csv", "estimate.csv", "classical.csv", "coefficients.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn overrides_apply() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"figure":"fig9_smooth_ancilla","seed":5,"output_dir":"from_config"}"#);
    let o = qwshrink(&["run", &cfg, "--seed", "9", "--shots", "64"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("from_config/report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 9);
    assert_eq!(report["shots"], 64);
}

#[test]
fn verify_passes_and_detects_injected_fault() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qwshrink(&["verify"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("kraus_completeness") && !table.contains("FAIL"));
    let o = qwshrink(&["verify", "--inject-fault"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kraus_completeness"));
}
