use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bbmlab::bbm::ConvergenceReport;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bbmlab"));
    c.env("RUST_LOG", "error");
    c
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_in(dir: &Path, config: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .expect("binary runs")
}

const QUICK: &str = r#"
p = 2.0
h = 0.005
expect = "member"

[domain]
kind = "interval"
a = 0.0
b = 1.0

[function]
kind = "linear"
v = [1.0]

[space]
kind = "lebesgue"
q = 2.0

[family]
kind = "bump"

[schedule]
nu_start = 0.2
ratio = 0.5
count = 5
"#;

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn bundled_linear_config_is_member() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &bundled("bbm_1d_linear.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("report.json")).unwrap();
    let report = ConvergenceReport::from_json(&text).unwrap();
    assert_eq!(report.verdict, bbmlab::Verdict::Member);
    assert!(tmp.path().join("plot.svg").exists());
}

#[test]
fn report_round_trips_and_series_rows_match() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "quick.cfg", QUICK);
    let out = run_in(&tmp.path().join("out"), &cfg, &["--stride", "1", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("out/report.json")).unwrap();
    let report = ConvergenceReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);

    let mut rdr = csv::Reader::from_path(tmp.path().join("out/series.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["nu_or_s", "value", "target", "ratio"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), report.schedule.len());
    let first: f64 = rows[0][0].parse().unwrap();
    assert_eq!(first, 0.2);

    let svg = fs::read_to_string(tmp.path().join("out/plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn json_config_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg: bbmlab::experiment::ExperimentConfig = toml::from_str(QUICK).unwrap();
    let path = write_cfg(tmp.path(), "quick.json", &serde_json::to_string(&cfg).unwrap());
    let out = run_in(&tmp.path().join("out"), &path, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn nu_violation_exits_one_with_range() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "bad.cfg", &QUICK.replace("nu_start = 0.2", "nu_start = 1.2"));
    let out = run_in(tmp.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("min{n/p, 1}"), "{err}");
}

#[test]
fn missing_space_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "bad.cfg", &QUICK.replace("[space]\nkind = \"lebesgue\"\nq = 2.0\n", ""));
    let out = run_in(tmp.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("space"));
}

#[test]
fn expectation_mismatch_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "wrong.cfg", &QUICK.replace("expect = \"member\"", "expect = \"non-member\""));
    let out = run_in(tmp.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not match"));
}

#[test]
fn missing_gradient_is_inconclusive() {
    // a step function has no gradient, hence no target
    let tmp = tempfile::tempdir().unwrap();
    let text = QUICK
        .replace("expect = \"member\"\n", "")
        .replace("kind = \"linear\"\nv = [1.0]", "kind = \"indicator-halfspace\"\nnormal = [1.0]\noffset = 0.5")
        .replace("count = 5", "count = 4");
    let cfg = write_cfg(tmp.path(), "step.cfg", &text);
    let out = run_in(tmp.path(), &cfg, &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_over_p_and_space() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "quick.cfg", QUICK);
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("sweep"))
        .args([
            "--jobs",
            "2",
            "p=1|2",
            r#"space={"kind":"lebesgue","q":2}|{"kind":"lorentz","r":2,"tau":2}"#,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(tmp.path().join("sweep/summary.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for k in 0..4 {
        assert!(tmp.path().join(format!("sweep/run-{k:03}/report.json")).exists());
    }
    // lorentz(2,2) reduces to lebesgue(2): same limits per p
    let limit = |k: usize| -> f64 {
        let text = fs::read_to_string(tmp.path().join(format!("sweep/run-{k:03}/report.json"))).unwrap();
        match ConvergenceReport::from_json(&text).unwrap().extrapolated_limit {
            Some(bbmlab::bbm::Limit::Finite(x)) => x,
            other => panic!("{other:?}"),
        }
    };
    assert!((limit(0) - limit(1)).abs() < 1e-8);
    assert!((limit(2) - limit(3)).abs() < 1e-8);
}

#[test]
fn empty_sweep_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "quick.cfg", QUICK);
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("sweep"))
        .env("BBMLAB_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    run_in(&tmp.path().join("single"), &cfg, &[]);
    let a = fs::read_to_string(tmp.path().join("sweep/run-000/report.json")).unwrap();
    let b = fs::read_to_string(tmp.path().join("single/report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oracle_subcommands() {
    let out = bin().args(["oracle", "sphere", "--p", "2", "--n", "2", "--samples", "20000"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["closed_form"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);

    let out = bin().args(["oracle", "rearrangement", "--values", "3,-1,2"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["levels"], serde_json::json!([3.0, 2.0, 1.0]));

    let out = bin()
        .args([
            "oracle",
            "dense",
            "--function",
            r#"{"kind":"constant","c":1.0}"#,
            "--kernel",
            r#"{"kind":"bump","nu":0.1}"#,
            "--resolution",
            "0.05",
        ])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], serde_json::json!(0.0));
}

#[test]
fn check_spaces_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("audit.json");
    let out = bin().args(["check-spaces", "--cases", "20", "--out"]).arg(&json).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(doc["axioms"].as_array().unwrap().len(), 4 * bbmlab::spaces::axioms::banach_catalog().len());
}
